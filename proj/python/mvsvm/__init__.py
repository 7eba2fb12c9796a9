"""Python face of the multi-view stacked SVM pipeline.

The heavy lifting lives in the compiled ``_mvsvm`` extension; this
package just re-exports it so ``import mvsvm`` works both for an
installed wheel (extension inside the package) and for a plain CMake
build (extension next to the package on ``PYTHONPATH``).
"""

try:
    from ._mvsvm import (
        Ensemble,
        MvsvmError,
        Preprocessor,
        Segmenter,
        eval_report,
        macro_f1,
        train_ensemble,
    )
except ImportError:
    from _mvsvm import (
        Ensemble,
        MvsvmError,
        Preprocessor,
        Segmenter,
        eval_report,
        macro_f1,
        train_ensemble,
    )

__all__ = [
    "Ensemble",
    "MvsvmError",
    "Preprocessor",
    "Segmenter",
    "eval_report",
    "macro_f1",
    "train_ensemble",
]
