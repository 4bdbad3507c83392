"""Entity-relationship data model and flight-path compiler for FLS displays.

Importing the package registers the built-in ``core``, ``animation`` and
``mri`` schemas.
"""

from . import schemas
from .animation import (AlgorithmRecord, AuthoringToolRecord, FCurve, Keyframe, add_keyframe,
                        algorithm_record, authoring_tool_record, channel_of, keyed_end_time)
from .errors import *  # noqa: F401,F403
from .frames import FrameSequence, PointSet
from .graph import Annotation, Entity, ModelGraph, Relationship
from .ingest import (TransferTable, VoxelGrid, VoxelSequence, parse_frames, parse_voxels,
                     read_frames, read_voxels, voxels_to_points, write_frames, write_voxels)
from .interp import eval_bezier, eval_channel, eval_linear, frame_count, sample_object
from .mri import (OrganRecord, ScanIngest, StiffnessTable, ingest_scan, label_organs,
                  read_stiffness, renderable_by, stiffness_at)
from .pathgen import (Assignment, FeasibilityReport, FlightPathSet, FlightSegment, assign,
                      check_feasibility, coalesce_intervals, compile_flight_paths, greedy_match,
                      hungarian, lit_time, reconstruct_frames, summarize)
from .pipeline import CompileResult, compile_model, object_frames
from .query import (annotate, contained_at, find_by_annotation, hidden_in, interactions_during,
                    organs_with_disease, parts_of, triggered_sounds)
from .records import DARK, AcousticRecord, ColorRGBA, Coordinate, FlsSpec, InteractionRecord
from .schema import (REGISTRY, AttrDef, EntitySetDef, RelSetDef, RoleDef, SchemaDef, get_schema,
                     register_schema)
from .schemas import ANIMATION, CHANNELS, CORE, MRI
from .store import (dumps_flight_paths, dumps_model, loads_flight_paths, loads_model,
                    read_flight_paths, read_model, write_flight_paths, write_model)
from .validation import ValidationReport, Violation, validate

__version__ = "0.1.0"
