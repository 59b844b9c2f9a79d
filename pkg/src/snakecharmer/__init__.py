"""Snake charmer toolkit: horizontal lifting of snout curves and holonomy orbits."""

from .bivalued import (BivaluedConfig, BivaluedLift, BivaluedOrbit, HairerError,
                       HairerReport, from_configuration, hairer_admissible,
                       horb_bivalued, lift_bivalued, to_configuration, w_endpoint)
from .configuration import (Configuration, ConstantPiece, Partition, SampledPiece,
                            SnakePolyline, act, constant_configuration, endpoint,
                            gram_defect, integrate_snake, is_lined,
                            polygonal_configuration, sedentariness,
                            smooth_configuration, spherical_dimension, sup_distance)
from .curves import (CircleArc, Composite, ConstantCurve, Curve, Hermite,
                     Parabola, Reparameterized, ScaledLoop, Segment,
                     hermite_through_points)
from .geometry import (INFINITY, GroupConstraintError, LieVector, MobiusElement,
                       SU11Element, apply, apply_points, boost, chart_coordinates,
                       chi, identity, mobius_to_su11, psi, renormalize,
                       rotation_element, sphere_point, stereo_project,
                       stereo_unproject, su11_cover_chart, su11_from_chart,
                       su11_to_mobius)
from .numerics import DEFAULT_SETTINGS, NumericsSettings
from .solver import (LiftDefectError, LiftOptions, LiftPreconditionError,
                     LiftResult, TurnsResult, check_horizontal, holonomy,
                     horizontal_lift, iterated_holonomy, lift_su11,
                     linmap_matrix_check, parallel_transport_to,
                     rotation_generating_word, smooth_loop_from_word)

__all__ = [name for name in dir() if not name.startswith("_")]
