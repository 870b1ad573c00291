"""Estimator plumbing: parameter introspection and input validation.

The transformers and classifier heads in this package follow the scikit-learn
estimator protocol (``fit`` / ``transform`` / ``predict_proba`` plus
``get_params`` / ``set_params``) without depending on scikit-learn itself, so
they can be dropped into pipelines and grid searches that rely on duck typing.
"""

from __future__ import annotations

import inspect

import numpy as np


class NotFittedError(RuntimeError):
    """Raised when ``transform``/``predict`` is called before ``fit``."""


class ParamsMixin:
    """get_params/set_params driven by the ``__init__`` signature.

    Subclasses must store every constructor argument on ``self`` under the
    same name, as scikit-learn estimators do.
    """

    @classmethod
    def _param_names(cls):
        sig = inspect.signature(cls.__init__)
        return [n for n in sig.parameters if n != "self"]

    def get_params(self, deep: bool = True) -> dict:
        return {name: getattr(self, name) for name in self._param_names()}

    def set_params(self, **params):
        valid = set(self._param_names())
        for name, value in params.items():
            if name not in valid:
                raise ValueError(
                    f"invalid parameter {name!r} for {type(self).__name__}; "
                    f"valid parameters: {sorted(valid)}"
                )
            setattr(self, name, value)
        return self

    def __repr__(self) -> str:
        args = ", ".join(f"{k}={v!r}" for k, v in self.get_params().items())
        return f"{type(self).__name__}({args})"


def check_array(X, *, name: str = "X", dtype=np.float64, ndim: int = 2) -> np.ndarray:
    """Coerce to a contiguous ndarray and reject non-finite entries."""
    arr = np.asarray(X, dtype=dtype)
    if arr.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if arr.size and not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return np.ascontiguousarray(arr)


def check_X_y(X, y):
    """Validate a feature matrix with an aligned binary label vector."""
    X = check_array(X)
    y = np.asarray(y, dtype=np.float64).ravel()
    if len(y) != X.shape[0]:
        raise ValueError(f"X has {X.shape[0]} rows but y has {len(y)} entries")
    labels = np.unique(y)
    if not np.all(np.isin(labels, (0.0, 1.0))):
        raise ValueError(f"y must be binary 0/1, got values {labels}")
    return X, y


def check_fitted(estimator, attribute: str) -> None:
    if getattr(estimator, attribute, None) is None:
        raise NotFittedError(
            f"{type(estimator).__name__} instance is not fitted; call fit() first"
        )
