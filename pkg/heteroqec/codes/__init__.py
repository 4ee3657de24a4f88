from .geometry import Region, QubitGeometry, stabilizer_ratio, degree_ratio, census_ratio, boundary_fraction, check_distance
from .surface_code import Deformation, Stabilizer, CodeInstance, build_css, build_code, apply_xy_deformation, xy_map, \
    face_qubits, lattice_faces, support, \
    syndrome, pure_error, logical_class, classify_qubits, describe, validate, stabilizer_group, check_enumerable
from .distances import pauli_distances, pure_letter_distance, coset_min_weights
