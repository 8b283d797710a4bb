import json

import pytest

from csrec.errors import InputError
from csrec.homology import GroupRingElem, concat, word_inverse
from csrec.manifold import (bundled_path, conjugator, cyclic_reduce, lens_space, load_manifold,
                            manifold_to_json, parse_manifold, twist_knot_presentation,
                            twist_knot_relator, twist_surgery_cell)
from csrec.repvar import longitude_word, swap_ab


@pytest.fixture(scope='module')
def twist_knots():
    with open(bundled_path('twist_knots.json')) as f:
        return json.load(f)['knots']


def test_twist_knot_words_match_bundled_table(twist_knots):
    for knot in twist_knots:
        n = knot['n']
        assert list(twist_knot_relator(n)) == knot['relator'], knot['name']
        assert list(longitude_word(n)) == knot['longitude'], knot['name']
        assert twist_knot_presentation(n).generators == 2


def test_twist_knot_presentation_rejects_zero():
    with pytest.raises(InputError):
        twist_knot_presentation(0)


def test_cyclic_reduce():
    assert cyclic_reduce((1, 2, -1)) == ((1,), (2,))
    assert cyclic_reduce((2, -1, 1, 2)) == ((), (2, 2))
    assert cyclic_reduce((1, 2, 3)) == ((), (1, 2, 3))


@pytest.mark.parametrize("n", [1, -1, 2, -2])
def test_swapped_relator_is_conjugate(n):
    r = twist_knot_relator(n)
    v, e = conjugator(r, swap_ab(r))
    source = r if e == 1 else word_inverse(r)
    assert concat(v, source, word_inverse(v)) == swap_ab(r)


def test_conjugator_examples():
    assert conjugator((1, 2), (2, 1)) is not None
    v, e = conjugator((1, 2), (-1, -2))
    assert e == -1 and concat(v, (-2, -1), word_inverse(v)) == (-1, -2)
    assert conjugator((1, 2), (1, 1)) is None


def test_figure_eight_surgery_matches_bundled_file():
    cell = twist_surgery_cell(-1, 6)
    with open(bundled_path('m6_fig8.json')) as f:
        doc = json.load(f)
    assert [list(r) for r in cell.presentation.relators] == doc['relators']
    expected = [GroupRingElem({tuple(t['word']): t['coeff'] for t in entry}) for entry in doc['d3']]
    assert list(cell.d3) == expected


@pytest.mark.parametrize("n,p", [(1, 5), (-1, -7), (2, 3)])
def test_surgery_cell_shape(n, p):
    cell = twist_surgery_cell(n, p)
    r1, r2 = cell.presentation.relators
    assert r1 == twist_knot_relator(n)
    assert r2 == concat((1,) * p if p > 0 else (-1,) * -p, longitude_word(n))
    assert cell.d3[1] == GroupRingElem.word((1,)) - GroupRingElem.one()


def test_lens_space_builder():
    lens = lens_space(5, [1, 2])
    assert lens.presentation.relators == ((1, 1, 1, 1, 1),)
    assert [r.id for r in lens.representations] == ['k=1', 'k=2']
    A = lens.representations[0].matrices[0]
    assert A.power(5).close_to(A.identity(), 1e-15)
    with pytest.raises(InputError):
        lens_space(1, [1])


def test_load_lens_file(lens_manifold):
    assert lens_manifold.name == 'L(5,1)'
    assert len(lens_manifold.representations) == 2
    built = lens_space(5, [1])
    assert lens_manifold.representations[0].matrices[0].close_to(built.representations[0].matrices[0], 1e-15)


def _minimal_doc():
    return {
        'name': 'L(3,1)',
        'generators': 1,
        'relators': [[1, 1, 1]],
        'd3': [[{'word': [1], 'coeff': 1}, {'word': [], 'coeff': -1}]],
        'representations': [{'id': 'k=0', 'matrices': [[['1', '0'], ['0', '1']]]}],
    }


@pytest.mark.parametrize("mutate,message", [
    (lambda d: d.pop('relators'), "missing 'relators'"),
    (lambda d: d.update(generators='one'), "wrong type"),
    (lambda d: d.update(d3=[]), "d3 needs 1 entries"),
    (lambda d: d.update(relators=[[1, 'x']]), "signed generator indices"),
    (lambda d: d['representations'][0].update(matrices=[[['2', '0'], ['0', '1']]]), "determinant"),
    (lambda d: d['representations'][0].update(matrices=[]), "expected 1 matrices"),
    (lambda d: d.update(representation_source={'other': {}}), "twist_variety"),
])
def test_parse_errors(mutate, message):
    doc = _minimal_doc()
    mutate(doc)
    with pytest.raises(InputError, match=message):
        parse_manifold(doc)


def test_load_errors(tmp_path):
    with pytest.raises(InputError, match="not found"):
        load_manifold(str(tmp_path / 'missing.json'))
    bad = tmp_path / 'bad.json'
    bad.write_text('{not json')
    with pytest.raises(InputError, match="not valid JSON"):
        load_manifold(str(bad))


def test_json_round_trip():
    doc = _minimal_doc()
    doc['v0'] = [['2', '1'], ['1', '1']]
    manifold = parse_manifold(doc)
    again = parse_manifold(json.loads(json.dumps(manifold_to_json(manifold))))
    assert again.cell.presentation == manifold.cell.presentation
    assert list(again.cell.d3) == list(manifold.cell.d3)
    assert again.v0.close_to(manifold.v0, 1e-15)
    assert again.representations[0].matrices[0].close_to(manifold.representations[0].matrices[0], 1e-15)
