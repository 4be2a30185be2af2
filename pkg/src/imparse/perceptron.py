"""Averaged multiclass perceptron over hashed sparse features.

Weights live in a nested map from feature id to class name to weight.
Updates keep running totals with timestamps so that averaging at the end
is O(touched weights) rather than O(all weights per step).
"""

from __future__ import annotations


class AveragedPerceptron:
    def __init__(self) -> None:
        self.weights: dict[int, dict[str, float]] = {}
        self._totals: dict[tuple[int, str], float] = {}
        self._stamps: dict[tuple[int, str], int] = {}
        self._clock = 0
        self.frozen = False

    def score(self, feats: list[int], classes: list[str]) -> dict[str, float]:
        scores = dict.fromkeys(classes, 0.0)
        for f in feats:
            row = self.weights.get(f)
            if not row:
                continue
            for cls, w in row.items():
                if cls in scores:
                    scores[cls] += w
        return scores

    def update(self, truth: str, guess: str, feats: list[int]) -> None:
        if self.frozen:
            raise RuntimeError("cannot update an averaged model")
        self._clock += 1
        if truth == guess:
            return
        for f in feats:
            self._bump(f, truth, 1.0)
            self._bump(f, guess, -1.0)

    def _bump(self, f: int, cls: str, delta: float) -> None:
        row = self.weights.setdefault(f, {})
        key = (f, cls)
        self._totals[key] = (self._totals.get(key, 0.0)
                             + (self._clock - self._stamps.get(key, 0))
                             * row.get(cls, 0.0))
        self._stamps[key] = self._clock
        row[cls] = row.get(cls, 0.0) + delta

    def freeze(self) -> None:
        """Replace live weights with their average over the whole run."""
        if self.frozen:
            return
        for f, row in self.weights.items():
            for cls, w in row.items():
                key = (f, cls)
                total = (self._totals.get(key, 0.0)
                         + (self._clock - self._stamps.get(key, 0)) * w)
                row[cls] = total / max(self._clock, 1)
        self._totals.clear()
        self._stamps.clear()
        self.frozen = True

    def prune(self) -> None:
        for f in list(self.weights):
            row = {c: w for c, w in self.weights[f].items() if w != 0.0}
            if row:
                self.weights[f] = row
            else:
                del self.weights[f]

    def to_json(self) -> dict:
        return {str(f): row for f, row in sorted(self.weights.items())}

    @classmethod
    def from_json(cls, obj: dict) -> "AveragedPerceptron":
        model = cls()
        model.weights = {int(f): dict(row) for f, row in obj.items()}
        model.frozen = True
        return model
