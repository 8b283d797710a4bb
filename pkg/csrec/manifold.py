"""
Manifold inputs for the homology route.

A manifold document carries a deficiency-zero presentation, the boundary
d3 (one group-ring entry per relator) and a list of representations, either
explicit matrices or a twist-surgery variety to enumerate on load:

    {
      "name": "...",
      "generators": 2,
      "relators": [[...], [...]],
      "d3": [[{"word": [...], "coeff": 1}, ...], ...],
      "representations": [{"id": "rho1", "matrices": [[["1", "1"], ["0", "1"]], ...]}],
      "representation_source": {"twist_variety": {"n": -1, "p": 6, "q": 1}},
      "v0": [["a", "b"], ["c", "d"]]
    }

Builders for twist-knot surgeries and lens spaces produce the same structure.
"""

import json
import os
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import mpmath
from mpmath import mp

from csrec.config import DATA_DIR, DEFAULT_SETTINGS, Settings
from csrec.errors import InputError
from csrec.homology import (CellStructure, GroupRingElem, Presentation, Representation, Word,
                            concat, reduce_word, word_inverse, word_power)
from csrec.numeric import SL2Matrix
from csrec.repvar import (RepPoint, TwistSurgerySpec, enumerate_variety, longitude_word,
                         rep_from_point, swap_ab, twist_word)


@dataclass
class RepresentationEntry:
    id: str
    matrices: Representation
    point: Optional[RepPoint] = None


@dataclass
class ManifoldInput:
    name: str
    cell: CellStructure
    representations: List[RepresentationEntry] = field(default_factory=list)
    v0: Optional[SL2Matrix] = None
    source: Optional[dict] = None

    @property
    def presentation(self) -> Presentation:
        return self.cell.presentation


# --- twist knots -------------------------------------------------------------------

def twist_knot_relator(n: int) -> Word:
    """W a W^-1 b^-1 with W = w^n."""
    W = twist_word(n)
    return concat(W, (1,), word_inverse(W), (-2,))


def twist_knot_presentation(n: int) -> Presentation:
    """One-relator presentation <a, b | W a = b W> of the twist knot group."""
    if n == 0:
        raise InputError("n must be nonzero")
    return Presentation(2, (twist_knot_relator(n),), name=f"twist knot n={n}")


def cyclic_reduce(word: Sequence[int]) -> Tuple[Word, Word]:
    """(c, core) with word = c core c^-1 and core cyclically reduced."""
    w = list(reduce_word(word))
    prefix: List[int] = []
    while len(w) >= 2 and w[0] == -w[-1]:
        prefix.append(w[0])
        w = w[1:-1]
    return tuple(prefix), tuple(w)


def conjugator(source: Sequence[int], target: Sequence[int]) -> Optional[Tuple[Word, int]]:
    """
    (v, e) with target = v source^e v^-1 in the free group, or None.
    """
    c_t, core_t = cyclic_reduce(target)
    for e in (1, -1):
        c_s, core_s = cyclic_reduce(source if e == 1 else word_inverse(source))
        if len(core_s) != len(core_t):
            continue
        for k in range(len(core_s)):
            if core_s[k:] + core_s[:k] == core_t:
                # core_t = Y core_s Y^-1 with Y the suffix
                suffix = core_s[k:]
                return concat(c_t, suffix, word_inverse(c_s)), e
    return None


def twist_surgery_cell(n: int, p: int) -> CellStructure:
    """
    Cell structure of M_{p/1}(K_n): relators r1 = W a W^-1 b^-1 and
    r2 = a^p lambda, lambda = swap(W) W. With swap(r1) = v r1^e v^-1,

        d3 = (a^p (swap(W) + e v), a - 1).
    """
    r1 = twist_knot_relator(n)
    lam = longitude_word(n)
    a_p = word_power((1,), p)
    r2 = concat(a_p, lam)
    found = conjugator(r1, swap_ab(r1))
    if found is None:
        raise InputError(f"swap(r) is not conjugate to r^+-1 for n={n}")
    v, e = found
    W_tilde = swap_ab(twist_word(n))
    d1 = GroupRingElem.word(concat(a_p, W_tilde)) + GroupRingElem.word(concat(a_p, v), e)
    d2 = GroupRingElem.word((1,)) - GroupRingElem.one()
    pres = Presentation(2, (r1, r2), name=f"M_{p}/1(twist n={n})")
    return CellStructure(pres.validate(), (d1, d2), name=pres.name)


def twist_surgery_manifold(n: int, p: int, settings: Settings = DEFAULT_SETTINGS) -> ManifoldInput:
    source = {'twist_variety': {'n': n, 'p': p, 'q': 1, 'eigenvalue': 'longitude'}}
    cell = twist_surgery_cell(n, p)
    return ManifoldInput(cell.name, cell, _representations_from_source(source, settings), source=source)


# --- lens spaces -------------------------------------------------------------------

def lens_space(p: int, ks: Sequence[int]) -> ManifoldInput:
    """L(p, 1) = <x | x^p>, d3 = x - 1, rho_k(x) = diag(zeta^k, zeta^-k)."""
    if p < 2:
        raise InputError(f"lens space needs p >= 2, got {p}")
    pres = Presentation(1, (word_power((1,), p),), name=f"L({p},1)")
    cell = CellStructure(pres.validate(), (GroupRingElem.word((1,)) - GroupRingElem.one(),), name=pres.name)
    reps = []
    for k in ks:
        zeta = mpmath.expjpi(mpmath.mpf(2 * k) / p)
        reps.append(RepresentationEntry(id=f"k={k}", matrices=(SL2Matrix(zeta, mpmath.mpc(0), mpmath.mpc(0), 1 / zeta),)))
    return ManifoldInput(pres.name, cell, reps)


# --- JSON ----------------------------------------------------------------------------

def _require(doc: dict, key: str, kind, where: str):
    if key not in doc:
        raise InputError(f"{where}: missing '{key}'")
    value = doc[key]
    if not isinstance(value, kind) or isinstance(value, bool):
        raise InputError(f"{where}: '{key}' has the wrong type")
    return value


def _parse_word(raw, where: str) -> Word:
    if not isinstance(raw, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in raw):
        raise InputError(f"{where}: a word must be a list of signed generator indices")
    return reduce_word(raw)


def _parse_matrix(raw, where: str) -> SL2Matrix:
    try:
        (a, b), (c, d) = raw
        g = SL2Matrix.of(str(a), str(b), str(c), str(d))
    except (TypeError, ValueError) as exc:
        raise InputError(f"{where}: bad matrix ({exc})")
    return g.check_det(1e-10)


def _representations_from_source(source: dict, settings: Settings) -> List[RepresentationEntry]:
    if 'twist_variety' not in source:
        raise InputError("representation_source must contain 'twist_variety'")
    cfg = source['twist_variety']
    spec = TwistSurgerySpec(
        n=_require(cfg, 'n', int, 'twist_variety'),
        p=_require(cfg, 'p', int, 'twist_variety'),
        q=cfg.get('q', 1),
        eigenvalue=cfg.get('eigenvalue', 'longitude'),
    )
    points = enumerate_variety(spec, settings)
    return [RepresentationEntry(id=f"rho{pt.index}", matrices=rep_from_point(pt), point=pt)
            for pt in points]


def parse_manifold(doc: dict, settings: Settings = DEFAULT_SETTINGS) -> ManifoldInput:
    """Validate a manifold document and build its cell structure and representations."""
    if not isinstance(doc, dict):
        raise InputError("manifold document must be a JSON object")
    name = doc.get('name', 'manifold')
    generators = _require(doc, 'generators', int, name)
    relators = tuple(_parse_word(r, f"{name} relator") for r in _require(doc, 'relators', list, name))
    pres = Presentation(generators, relators, name=name).validate()
    raw_d3 = _require(doc, 'd3', list, name)
    if len(raw_d3) != len(relators):
        raise InputError(f"{name}: d3 needs {len(relators)} entries, got {len(raw_d3)}")
    d3 = []
    for i, entry in enumerate(raw_d3, 1):
        if not isinstance(entry, list):
            raise InputError(f"{name}: d3 entry {i} must be a list of terms")
        elem = GroupRingElem()
        for term in entry:
            if not isinstance(term, dict):
                raise InputError(f"{name}: d3 entry {i} has a malformed term")
            word = _parse_word(_require(term, 'word', list, f"d3[{i}]"), f"d3[{i}]")
            elem = elem + GroupRingElem.word(word, _require(term, 'coeff', int, f"d3[{i}]"))
        d3.append(elem)
    cell = CellStructure(pres, tuple(d3), name=name)

    with mp.workprec(settings.precision):
        reps: List[RepresentationEntry] = []
        for k, raw in enumerate(doc.get('representations', []) or []):
            where = f"{name} representation {k}"
            if not isinstance(raw, dict):
                raise InputError(f"{where}: must be an object")
            matrices = _require(raw, 'matrices', list, where)
            if len(matrices) != generators:
                raise InputError(f"{where}: expected {generators} matrices, got {len(matrices)}")
            reps.append(RepresentationEntry(
                id=str(raw.get('id', f"rho{k}")),
                matrices=tuple(_parse_matrix(m, where) for m in matrices)))
        source = doc.get('representation_source')
        if source is not None:
            if not isinstance(source, dict):
                raise InputError(f"{name}: representation_source must be an object")
            reps.extend(_representations_from_source(source, settings))
        v0 = _parse_matrix(doc['v0'], f"{name} v0") if doc.get('v0') is not None else None
    return ManifoldInput(name, cell, reps, v0=v0, source=source)


def load_manifold(path: str, settings: Settings = DEFAULT_SETTINGS) -> ManifoldInput:
    if not os.path.exists(path):
        raise InputError(f"manifold file not found: {path}")
    try:
        with open(path, 'r') as f:
            doc = json.load(f)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}")
    return parse_manifold(doc, settings)


def bundled_path(filename: str) -> str:
    return os.path.join(DATA_DIR, filename)


def manifold_to_json(manifold: ManifoldInput, digits: int = 30, include_matrices: bool = True) -> dict:
    """Inverse of parse_manifold; a twist_variety source is written as the source, not as matrices."""
    cell = manifold.cell
    doc = {
        'name': manifold.name,
        'generators': cell.presentation.generators,
        'relators': [list(r) for r in cell.presentation.relators],
        'd3': [[{'word': list(w), 'coeff': c} for w, c in entry.items()] for entry in cell.d3],
    }
    explicit = [r for r in manifold.representations if r.point is None or manifold.source is None]
    if include_matrices and explicit:
        doc['representations'] = [
            {'id': r.id, 'matrices': [g.to_rows(digits) for g in r.matrices]} for r in explicit]
    if manifold.source is not None:
        doc['representation_source'] = manifold.source
    if manifold.v0 is not None:
        doc['v0'] = manifold.v0.to_rows(digits)
    return doc
