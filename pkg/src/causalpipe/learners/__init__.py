"""Structure-learner ensemble: PC-stable, score search (hill/tabu/ges),
MMHC, and optional LiNGAM. Learners are pure functions of (data, config,
seed), so the ensemble can run in parallel and still be deterministic."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Mapping

from ..dataset import Dataset

from .base import LearnerError, LearnerOutput
from .pc import pc_learn
from .score import score_search_learn
from .mmhc import mmhc_learn
from .lingam import lingam_learn

LEARNER_IDS = ("pc", "hc", "tabu", "ges", "mmhc", "lingam")


def run_learner(learner_id: str, d: Dataset, alpha: float = 0.01,
                config: Mapping | None = None) -> LearnerOutput:
    config = dict(config or {})
    if learner_id == "pc":
        return pc_learn(d, alpha=alpha, config=config)
    if learner_id in ("hc", "tabu", "ges"):
        strategy = "hill" if learner_id == "hc" else learner_id
        out = score_search_learn(d, strategy=strategy, config=config,
                                 learner_id=learner_id)
        return out
    if learner_id == "mmhc":
        return mmhc_learn(d, alpha=alpha, config=config)
    if learner_id == "lingam":
        return lingam_learn(d)
    raise LearnerError(f"unknown learner {learner_id!r}")


def run_ensemble(d: Dataset, learner_ids=("pc", "hc", "tabu", "ges", "mmhc"),
                 alpha: float = 0.01, configs: Mapping[str, Mapping] | None = None,
                 max_workers: int | None = None) -> list[LearnerOutput]:
    """Run the ensemble (parallel across learners); outputs in request order."""
    configs = configs or {}
    with ThreadPoolExecutor(max_workers=max_workers or len(learner_ids)) as pool:
        futures = [
            pool.submit(run_learner, lid, d, alpha, configs.get(lid))
            for lid in learner_ids
        ]
        return [f.result() for f in futures]


__all__ = [
    "LearnerError", "LearnerOutput", "LEARNER_IDS",
    "pc_learn", "score_search_learn", "mmhc_learn", "lingam_learn",
    "run_learner", "run_ensemble",
]
