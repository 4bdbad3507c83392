"""Built-in schemas: the core FLS display model and its animation and MRI extensions.

The extensions rename the core's Subject / Digital Device / Objects /
Algorithms sets and add their own sets, so all three are produced by one
builder. ``SchemaDef.aliases`` records the renaming so queries can address
"Objects" or "Subject" regardless of which schema a graph uses.
"""

from __future__ import annotations

from .schema import REGISTRY, AttrDef, EntitySetDef, RelSetDef, RoleDef, SchemaDef

A = AttrDef
UNIT = dict(lo=0.0, hi=1.0)

CHANNELS = (
    "position.l", "position.h", "position.d",
    "color.r", "color.g", "color.b", "color.a",
    "scale",
)

# static per-channel attributes on object-like sets
STATIC_CHANNEL_ATTRS = {
    "position.l": "pos_l",
    "position.h": "pos_h",
    "position.d": "pos_d",
    "color.r": "color_r",
    "color.g": "color_g",
    "color.b": "color_b",
    "color.a": "color_a",
    "scale": "scale",
}

_STATIC_ATTRS = (
    A("pos_l", "float"), A("pos_h", "float"), A("pos_d", "float"),
    A("color_r", "float", **UNIT), A("color_g", "float", **UNIT),
    A("color_b", "float", **UNIT), A("color_a", "float", **UNIT),
    A("scale", "float", positive=True),
)


def _build(
    name: str,
    *,
    subject: str,
    subject_attrs: tuple[AttrDef, ...],
    device: str,
    device_attrs: tuple[AttrDef, ...],
    recorded_by: str,
    objects: str,
    object_attrs: tuple[AttrDef, ...],
    objects_prefix: str,
    algorithms: str,
    algorithms_prefix: str,
    algorithm_subsets: tuple[EntitySetDef, ...],
    extra_entities: tuple[EntitySetDef, ...] = (),
    extra_rels: tuple[RelSetDef, ...] = (),
    coord_attrs: tuple[AttrDef, ...] = (),
) -> SchemaDef:
    entities = (
        EntitySetDef(subject, subject_attrs, prefix="subj" if subject == "Subject" else None),
        EntitySetDef(device, device_attrs, prefix="dev" if device == "Digital Device" else None),
        EntitySetDef(objects, (
            A("name", required=True),
            A("geometry"),
            A("unilluminated", "bool"),
            *object_attrs,
            *_STATIC_ATTRS,
        ), prefix=objects_prefix),
        EntitySetDef("Acoustics", (
            A("sound_id"),
            A("pitch", "float", lo=0.0),
            A("db", "float"),
            A("frequency", "float", lo=0.0),
        ), prefix="snd", open_attributes=True),
        EntitySetDef("FLSs", (
            A("nu", "float", required=True, positive=True),
            A("beta", "float", required=True, positive=True),
            A("force_n", "float", required=True, lo=0.0),
            A("omega", "float", required=True, positive=True),
            A("fls_index", "int", lo=0),
        ), prefix="fls"),
        EntitySetDef("3D Coordinates", (
            A("l", "float", required=True),
            A("h", "float", required=True),
            A("d", "float", required=True),
            *coord_attrs,
        ), prefix="coord"),
        EntitySetDef("Colors", (
            A("r", "float", required=True, **UNIT),
            A("g", "float", required=True, **UNIT),
            A("b", "float", required=True, **UNIT),
            A("a", "float", required=True, **UNIT),
        ), prefix="color"),
        EntitySetDef(algorithms, (A("name", required=True), A("params")), prefix=algorithms_prefix),
        *algorithm_subsets,
        *extra_entities,
    )
    rels = (
        RelSetDef("Contains", (
            RoleDef("subject", subject),
            RoleDef("object", objects),
        ), (A("enter", "float", required=True, lo=0.0), A("exit", "float")),
            prefix="cont", ordered=(("enter", "exit"),)),
        RelSetDef("Consists-Of", (
            RoleDef("parent", objects),
            RoleDef("child", objects),
        ), prefix="cons", acyclic=("parent", "child")),
        RelSetDef("Interactions", (
            RoleDef("source", objects),
            RoleDef("target", objects),
        ), (
            A("interaction_id"),
            A("start", "float", required=True),
            A("end", "float", required=True),
            A("description"),
        ), prefix="inter", ordered=(("start", "end"),)),
        RelSetDef("Make Noise", (
            RoleDef("object", objects),
            RoleDef("acoustic", "Acoustics"),
        ), (A("time", "float", lo=0.0), A("trigger")),
            prefix="noise", any_of=(("time", "trigger"),)),
        RelSetDef(recorded_by, (
            RoleDef("subject", subject),
            RoleDef("device", device),
        ), prefix="rec"),
        RelSetDef("Flight Paths", (
            RoleDef("object", objects, "total"),
            RoleDef("fls", "FLSs", "total"),
            RoleDef("coordinate", "3D Coordinates", required=False),
            RoleDef("color", "Colors", required=False),
            RoleDef("algorithm", algorithms, required=False),
            RoleDef("interaction", "Interactions", required=False),
            RoleDef("noise", "Make Noise", required=False),
        ), (
            A("interval", "interval", multi=True, allow_duplicates=True),
            A("source"),
        ), prefix="fp", role_alternatives=(("coordinate", "color"), ("algorithm",))),
        *extra_rels,
    )
    aliases = {
        "Subject": subject,
        "Digital Device": device,
        "Objects": objects,
        "Algorithms": algorithms,
        "Recorded-By": recorded_by,
    }
    return SchemaDef(name, entities, rels, aliases)


CORE = _build(
    "core",
    subject="Subject",
    subject_attrs=(A("name"),),
    device="Digital Device",
    device_attrs=(A("name"), A("model"), A("specifications")),
    recorded_by="Recorded-By",
    objects="Objects",
    object_attrs=(),
    objects_prefix="obj",
    algorithms="Algorithms",
    algorithms_prefix="alg",
    algorithm_subsets=(EntitySetDef("Rendering", parent="Algorithms", prefix="rend"),),
)

ANIMATION = _build(
    "animation",
    subject="Scene",
    subject_attrs=(A("name"),),
    device="Authoring Tool",
    device_attrs=(A("name", required=True), A("model"), A("software_specifications")),
    recorded_by="Authored-With",
    objects="Objects",
    object_attrs=(A("material"), A("rig")),
    objects_prefix="obj",
    algorithms="Derived Algorithms",
    algorithms_prefix="dalg",
    algorithm_subsets=(
        EntitySetDef("Rendering", parent="Derived Algorithms", prefix="rend"),
        EntitySetDef("Interpolation", parent="Derived Algorithms", prefix="interp"),
    ),
    extra_entities=(
        EntitySetDef("Authoring Tool Algorithms", (A("name", required=True), A("params")),
                     prefix="talg"),
        EntitySetDef("Keyframe", (
            A("time", "float", required=True, lo=0.0),
            A("channel", required=True, choices=CHANNELS),
            A("value", "float", required=True),
            A("interp", required=True, choices=("linear", "bezier")),
            A("hl_dt", "float"), A("hl_dv", "float"),
            A("hr_dt", "float"), A("hr_dv", "float"),
        ), prefix="key"),
    ),
    extra_rels=(
        RelSetDef("Derived From", (
            RoleDef("derived", "Derived Algorithms"),
            RoleDef("source", "Authoring Tool Algorithms"),
        ), prefix="dfrom"),
        RelSetDef("Has Keyframe", (
            RoleDef("object", "Objects"),
            RoleDef("keyframe", "Keyframe", "total"),
        ), prefix="haskey"),
        RelSetDef("Keyframe Interpolation", (
            RoleDef("keyframe", "Keyframe"),
            RoleDef("algorithm", "Interpolation"),
        ), prefix="keyalg"),
        RelSetDef("Object Rendering", (
            RoleDef("object", "Objects"),
            RoleDef("algorithm", "Rendering"),
        ), prefix="objrend"),
    ),
)

MRI = _build(
    "mri",
    subject="Patient",
    subject_attrs=(A("name"), A("unilluminated", "bool")),
    device="Medical Imaging Equipment",
    device_attrs=(A("name"), A("model"), A("specifications")),
    recorded_by="Scanned-By",
    objects="Organs",
    object_attrs=(
        A("disease", multi=True),
        A("size", "int", lo=1),
        A("centroid_l", "float"), A("centroid_h", "float"), A("centroid_d", "float"),
        A("mean_intensity", "float"),
        A("stiffness", "float", lo=0.0),
    ),
    objects_prefix="organ",
    algorithms="Algorithms",
    algorithms_prefix="alg",
    algorithm_subsets=(
        EntitySetDef("Rendering", parent="Algorithms", prefix="rend"),
        EntitySetDef("Organ Annotation", parent="Algorithms", prefix="oann"),
    ),
    coord_attrs=(A("voxel", "int", lo=0), A("intensity", "float")),
    extra_rels=(
        RelSetDef("Occupies", (
            RoleDef("organ", "Organs"),
            RoleDef("coordinate", "3D Coordinates"),
            RoleDef("color", "Colors"),
        ), prefix="occ"),
        RelSetDef("Labeled-By", (
            RoleDef("organ", "Organs"),
            RoleDef("algorithm", "Organ Annotation"),
        ), prefix="lab"),
    ),
)

for _s in (CORE, ANIMATION, MRI):
    REGISTRY.register(_s)
