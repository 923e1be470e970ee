"""
End-to-end pipeline: build -> symbolic verify -> numeric verify -> MUB
extraction -> certificate.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional

from .analysis import (
    EIGENVECTOR_TOLERANCE,
    UNBIASED_TOLERANCE,
    CertificateReport,
    MubFamily,
    certify_strong_unextendibility,
    extension_witness_deviation,
    extract_mub_family,
    family_unbiasedness,
    unitarity_deviation,
)
from .constructions import (
    DEFAULT_ATTEMPT_BUDGET,
    Decomposition,
    Family,
    SubgroupSearchResult,
    build_ab_decomposition,
    build_galois_decomposition,
    find_galois_subgroup,
)
from .residue import check_modulus
from .utils import PerformanceTimer
from .weyl import DEFAULT_TOLERANCE

logger = logging.getLogger(__name__)

# --- CONFIGURATION ---
# Above this prime the dense numeric layer only runs when forced.
NUMERIC_AUTO_MAX_P = 7

DEFAULT_TOLERANCES = {
    "complementarity": DEFAULT_TOLERANCE,
    "unbiasedness": UNBIASED_TOLERANCE,
    "eigenvector": EIGENVECTOR_TOLERANCE,
}


@dataclass
class PipelineConfig:
    p: int
    family: Family = Family.GALOIS
    nonresidue: Optional[int] = None
    seed: int = 0
    numeric: Optional[bool] = None
    tolerances: Dict[str, float] = field(default_factory=dict)
    attempt_budget: int = DEFAULT_ATTEMPT_BUDGET
    workers: int = 1

    def __post_init__(self):
        check_modulus(self.p)
        self.family = Family(self.family)
        if self.family is Family.CUSTOM:
            raise ValueError("The pipeline builds galois or ab decompositions; verify custom ones with verify_external")
        unknown = set(self.tolerances) - set(DEFAULT_TOLERANCES)
        if unknown:
            raise ValueError(f"Unknown tolerance names: {sorted(unknown)}")
        self.tolerances = {**DEFAULT_TOLERANCES, **self.tolerances}
        for name, value in self.tolerances.items():
            if not value > 0:
                raise ValueError(f"Tolerance '{name}' must be positive, got {value}")
        if self.attempt_budget < 1:
            raise ValueError(f"attempt_budget must be positive, got {self.attempt_budget}")
        self.workers = max(1, int(self.workers))

    @property
    def numeric_enabled(self):
        if self.numeric is None:
            return self.p <= NUMERIC_AUTO_MAX_P
        return bool(self.numeric)

    def provenance(self):
        return {
            "seed": int(self.seed),
            "numeric": self.numeric_enabled,
            "nonresidue": self.nonresidue,
            "attempt_budget": int(self.attempt_budget),
            "tolerances": dict(self.tolerances),
        }


@dataclass
class PipelineResult:
    decomposition: Decomposition
    mub_family: Optional[MubFamily]
    report: CertificateReport
    subgroup: Optional[SubgroupSearchResult] = None


class CertifySession:
    """
    One pipeline run. The configuration is fixed for the lifetime of the
    session; each stage is computed once and reused by the later ones.
    """

    def __init__(self, config: PipelineConfig):
        self.config = config
        self.decomposition = None
        self.subgroup = None
        self.report = None
        self.mub_family = None

    def decompose(self) -> Decomposition:
        if self.decomposition is not None:
            return self.decomposition
        cfg = self.config
        with PerformanceTimer(f"Stage: decompose ({cfg.family.value}, p={cfg.p})", logger):
            if cfg.family is Family.GALOIS:
                self.subgroup = find_galois_subgroup(cfg.p, seed=cfg.seed, attempt_budget=cfg.attempt_budget,
                                                     workers=cfg.workers)
                self.decomposition = build_galois_decomposition(cfg.p, self.subgroup)
            else:
                self.decomposition = build_ab_decomposition(cfg.p, cfg.nonresidue)
        return self.decomposition

    def extract_mubs(self) -> MubFamily:
        if self.mub_family is None:
            self.mub_family = extract_mub_family(self.decompose(), seed=self.config.seed,
                                                 workers=self.config.workers)
        return self.mub_family

    def certify(self) -> CertificateReport:
        if self.report is not None:
            return self.report
        cfg = self.config
        decomposition = self.decompose()
        provenance = cfg.provenance()
        if decomposition.nonresidue is not None:
            provenance["nonresidue"] = decomposition.nonresidue.value
        with PerformanceTimer("Stage: certify", logger):
            report = certify_strong_unextendibility(decomposition, numeric=cfg.numeric_enabled,
                                                    tol=cfg.tolerances["complementarity"],
                                                    workers=cfg.workers, provenance=provenance)
        if cfg.numeric_enabled:
            self._add_mub_residuals(report)
        self.report = report
        return report

    def _add_mub_residuals(self, report):
        cfg = self.config
        family = self.extract_mubs()
        with PerformanceTimer("Stage: MUB residuals", logger):
            _, worst = family_unbiasedness(family, cfg.tolerances["unbiasedness"])
            report.residuals["mub_unbiasedness"] = worst
            report.residuals["eigenbasis"] = max(
                [max(family.eigen_residuals, default=0.0)] + [unitarity_deviation(U) for U in family.bases])
            if cfg.family is Family.AB and cfg.p % 4 == 1:
                report.residuals["extension_witness"] = extension_witness_deviation(
                    family, self.decomposition.nonresidue, cfg.seed)
                report.notes.append("extension witness: eigenbases of the recombined MASAs")
        if worst > cfg.tolerances["unbiasedness"]:
            logger.warning(f"MUB unbiasedness deviation {worst:.3e} exceeds {cfg.tolerances['unbiasedness']}")

    def run(self) -> PipelineResult:
        report = self.certify()
        return PipelineResult(self.decomposition, self.mub_family, report, self.subgroup)


def run_pipeline(cfg: PipelineConfig) -> PipelineResult:
    return CertifySession(cfg).run()


def verify_external(decomposition: Decomposition, numeric=False, tol=DEFAULT_TOLERANCE, workers=1,
                    provenance=None) -> CertificateReport:
    """Re-verifies a decomposition of any provenance; stored kind tags are checked, never trusted."""
    report = certify_strong_unextendibility(decomposition, numeric=numeric, tol=tol, workers=workers,
                                            provenance=provenance)
    report.notes.append("externally supplied decomposition re-verified from its subspaces")
    return report
