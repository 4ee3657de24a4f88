from .likelihoods import Method, CosetLikelihoods, Correction, CLASS_ORDER
from .exact import exact_coset_likelihoods
from .tn import LatticeNetwork, tn_coset_likelihoods
from .decode import coset_likelihoods, correction_for, decode, Decoder
