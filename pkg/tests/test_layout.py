import pytest

from edpc.layout import (
    Color,
    LayoutError,
    RotatedLayout,
    build_grid,
    build_operator_graph,
    build_swap_layout,
    embed_qubits,
    grid_side_for,
    is_horizontal,
    is_vertical,
    layout_json,
    swap_grid_for,
)


def test_colors_on_small_grid():
    g = build_grid(5)
    assert g.color((2, 2)) is Color.BLACK
    assert g.color((1, 1)) is Color.WHITE
    assert g.color((1, 2)) is Color.GREY and g.color((2, 3)) is Color.GREY
    assert g.black_vertices == ((2, 2), (2, 4), (4, 2), (4, 4))
    assert len(g.edges) == 2 * 5 * 4


def test_black_vertices_never_touch():
    g = build_grid(9)
    for v in g.black_vertices:
        assert not any(g.is_data(u) for u in g.neighbors(v))


def test_grid_side_rules():
    with pytest.raises(LayoutError):
        build_grid(4)
    with pytest.raises(LayoutError):
        build_grid(1)
    with pytest.warns(UserWarning):
        build_grid(6, allow_even=True)
    assert [grid_side_for(n) for n in (1, 4, 5, 9, 16, 17, 64)] == [3, 5, 7, 7, 9, 11, 17]


def test_embedding_and_boundary():
    g = build_grid(7)
    emb = embed_qubits(5, g)
    assert emb.positions == ((2, 2), (2, 4), (2, 6), (4, 2), (4, 4))
    assert all(v in g.perimeter and not g.is_data(v) for v in emb.boundary)
    assert len(emb.boundary) == 4 * 6
    with pytest.raises(LayoutError):
        embed_qubits(10, g)
    doc = layout_json(g, emb)
    assert doc["L"] == 7 and len(doc["vertices"]) == 49


def test_operator_graph_orientation():
    g = build_grid(7)
    c, t, other = (2, 2), (4, 4), (2, 4)
    og = build_operator_graph(g, [(c, t)])
    assert set(og.out(c)) == {(1, 2), (3, 2)}
    assert other not in og.arcs
    into_t = [v for v, outs in og.arcs.items() if t in outs]
    assert sorted(into_t) == [(4, 3), (4, 5)]
    assert all(is_vertical(c, u) for u in og.out(c))
    assert all(is_horizontal(v, t) for v in into_t)


def test_operator_graph_rejects_bad_terminals():
    g = build_grid(7)
    with pytest.raises(LayoutError):
        build_operator_graph(g, [((2, 2), (2, 3))])
    with pytest.raises(LayoutError):
        build_operator_graph(g, [((2, 2), (2, 4)), ((2, 4), (4, 4))])


def test_blocked_edges_and_vertices():
    g = build_grid(7)
    og = build_operator_graph(g, [((2, 2), (4, 4))], blocked_edges={((1, 2), (2, 2))}, blocked_vertices={(3, 3)})
    assert og.out((2, 2)) == ((3, 2),)
    assert (3, 3) not in og.arcs
    assert (3, 3) not in og.out((3, 2))


def test_rotated_layout_counts():
    lay = RotatedLayout(4, 5)
    assert lay.space == 46
    assert len(lay.sites) == 20
    assert lay.patch_rows == 8
    assert len(lay.boundary_sites) == 14
    for s1, s2 in lay.site_edges:
        a1, a2 = lay.common_ancillas(s1, s2)
        p1, p2 = lay.patch(s1), lay.patch(s2)
        for a in (a1, a2):
            assert a not in lay.data_patches
            assert (is_horizontal(a, p1) or is_vertical(a, p1)) and (is_horizontal(a, p2) or is_vertical(a, p2))


def test_swap_grid_sizing():
    assert swap_grid_for(64) == (8, 8)
    assert swap_grid_for(15) == (4, 4)
    assert swap_grid_for(12) == (3, 4)
    assert RotatedLayout(8, 8).space == 141
    with pytest.raises(LayoutError):
        build_swap_layout(10, 3, 3)
