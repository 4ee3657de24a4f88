from .channel import BiasedChannel, make_channel
from .placement import Strategy, QubitType, PlacementSpec, placement_order, assign_placement
from .model import RegimeKind, RegimeA, RegimeB, Homogeneous, NoiseModel, build_noise_model, uniform_model, \
    point_key, trial_stream, sample_error, channel_table, write_channel_table
