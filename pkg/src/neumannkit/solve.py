"""Backend dispatch and the on-disk eigenfield cache."""

from __future__ import annotations

import hashlib
import json
import logging
import os
from dataclasses import dataclass
from pathlib import Path

from . import mfs
from .eigenfield import EigenField, closed_form
from .errors import NoEigenvalueFound, UnsupportedError
from .geometry import DomainSpec

log = logging.getLogger(__name__)

CACHE_ENV = "NEUMANNKIT_CACHE"


@dataclass(frozen=True)
class MFSOptions:
    charges: int = 100
    collocation: int | None = None
    interior_probes: int = 60
    d_scale: float = 0.12
    symmetric: bool = True
    scan_step: float = 0.02

    @classmethod
    def for_domain(cls, spec: DomainSpec) -> "MFSOptions":
        """Defaults validated per family: petals need closer charges and a finer wedge."""
        if spec.kind == "flower":
            return cls(charges=80, d_scale=0.1)
        if spec.kind == "star":
            return cls(charges=80, d_scale=0.15)
        return cls(charges=80, d_scale=0.15)

    def to_config(self) -> dict:
        return {"charges": self.charges, "collocation": self.collocation, "interior_probes": self.interior_probes,
                "d_scale": self.d_scale, "symmetric": self.symmetric, "scan_step": self.scan_step}


@dataclass
class Solver:
    """Computes (and optionally caches) eigenfields by index.

    Square, disk and annulus use closed forms unless ``backend='mfs'``; other
    domains always use fundamental solutions.  Ground states of dihedrally
    symmetric domains use the symmetrized basis.
    """

    backend: str = "auto"
    options: MFSOptions | None = None
    cache_dir: Path | None = None

    def __post_init__(self):
        self._memo: dict = {}
        if self.cache_dir is None and os.environ.get(CACHE_ENV):
            self.cache_dir = Path(os.environ[CACHE_ENV])
        if self.cache_dir is not None:
            self.cache_dir = Path(self.cache_dir)

    def _key(self, spec: DomainSpec, k: int, backend: str) -> str:
        doc = {"domain": spec.to_config(), "k": k, "backend": backend}
        if backend == "mfs":
            doc["options"] = self._options(spec).to_config()
        digest = hashlib.sha256(json.dumps(doc, sort_keys=True).encode()).hexdigest()[:16]
        return f"{spec.kind}-k{k}-{digest}.json"

    def _options(self, spec: DomainSpec) -> MFSOptions:
        return self.options or MFSOptions.for_domain(spec)

    def _backend(self, spec: DomainSpec) -> str:
        if self.backend == "auto":
            return "closed_form" if spec.kind in ("square", "disk", "annulus") else "mfs"
        if self.backend == "closed_form" and spec.kind not in ("square", "disk", "annulus"):
            raise UnsupportedError(f"no closed form for {spec.label}")
        return self.backend

    def field(self, spec: DomainSpec, k: int = 1) -> EigenField:
        backend = self._backend(spec)
        key = self._key(spec, k, backend)
        if key in self._memo:
            return self._memo[key]
        path = self.cache_dir / key if self.cache_dir else None
        if path is not None and path.exists():
            fld = self._memo[key] = EigenField.load(path)
            return fld
        fld = closed_form(spec, k) if backend == "closed_form" else self._mfs(spec, k)
        self._memo[key] = fld
        if path is not None:
            path.parent.mkdir(parents=True, exist_ok=True)
            fld.save(path)
        return fld

    def _mfs(self, spec: DomainSpec, k: int) -> EigenField:
        if spec.kind == "square":
            raise UnsupportedError("the square has corners; fundamental solutions need a smooth boundary")
        o = self._options(spec)
        sym = spec.dihedral_order if o.symmetric else None
        if k == 1:
            return mfs.ground_state(spec, o.charges, o.collocation, o.interior_probes, sym, o.d_scale)
        first = self.field(spec, 1)
        lo = first.lam * 1.02
        index = 2
        for _ in range(8):
            hi = lo * 1.6
            try:
                found = mfs.mfs_solve(spec, (lo, hi), o.charges, o.collocation, o.interior_probes,
                                      None, o.d_scale, o.scan_step, first_index=index)
            except NoEigenvalueFound:
                found = []
            for _, fld in found:
                mult = fld.meta["multiplicity"]
                if fld.index <= k < fld.index + mult:
                    return fld
                index = fld.index + mult
            lo = hi
        raise NoEigenvalueFound(f"{spec.label}: eigenpair {k} not found")
