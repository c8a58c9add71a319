"""The 3D object description language: model, evaluator and exporters."""

import functools
from importlib import resources

from ..pipeline import Language
from .evaluate import CubeInstance, EvalState, Evaluator, evaluate
from .export import export_json, export_obj, json_text, obj_text
from .language import build_scene3d_model

CORPUS = ("snail", "helix")


def corpus_text(name: str) -> str:
    """Source of a bundled example program (``snail`` or ``helix``)."""
    return resources.files(__package__).joinpath("corpus", f"{name}.s3d").read_text(encoding="utf-8")


@functools.lru_cache(maxsize=None)
def scene3d_language() -> Language:
    """The built-in language, synthesised once per process."""
    return Language(build_scene3d_model())


MODEL_FILE = "scene3d.asm.yaml"


def model_file_text() -> str:
    """The built-in model as a model description file."""
    return resources.files(__package__).joinpath(MODEL_FILE).read_text(encoding="utf-8")
