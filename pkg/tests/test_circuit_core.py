"""Circuit IR: construction, evaluation, depth, validation, serialization."""

from functools import reduce

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import monoreach as mr
from monoreach import AND, OR
from monoreach.circuit import AdjacencyMatrix, bool_matrix_product, input_matrix


def matrix_of(n, *edges):
    return AdjacencyMatrix.from_edges(n, edges)


class TestNewCircuit:
    def test_input_counts(self):
        assert mr.new_circuit(2).num_inputs == 4
        assert mr.new_circuit(1).num_inputs == 1
        assert mr.new_circuit(5).num_inputs == 25

    def test_fresh_circuit_shape(self):
        c = mr.new_circuit(3)
        assert c.gate_count == 0
        assert c.outputs == []
        assert c.zero == 9

    def test_zero_vertices_rejected(self):
        with pytest.raises(mr.InvalidParameterError):
            mr.new_circuit(0)


class TestAddGate:
    def test_returns_fresh_wire(self):
        c = mr.new_circuit(2)
        w = c.add_gate(AND, c.input_wire(1, 1), c.input_wire(1, 2))
        assert w == c.num_inputs + 1  # first wire after inputs and zero

    def test_or_with_zero_is_identity(self):
        c = mr.new_circuit(2)
        g12 = c.input_wire(1, 2)
        c.set_outputs([c.add_gate(OR, c.zero, g12)])
        for t in range(16):
            m = AdjacencyMatrix(2, [t & 3, (t >> 2) & 3])
            assert c.evaluate(m) == m.entry(1, 2)

    def test_and_with_zero_annihilates(self):
        c = mr.new_circuit(2)
        c.set_outputs([c.add_gate(AND, c.zero, c.input_wire(1, 2))])
        for t in range(16):
            m = AdjacencyMatrix(2, [t & 3, (t >> 2) & 3])
            assert c.evaluate(m) == 0

    def test_dangling_reference(self):
        c = mr.new_circuit(2)
        with pytest.raises(mr.InvalidReferenceError):
            c.add_gate(AND, 0, 99)

    def test_bad_op(self):
        c = mr.new_circuit(2)
        with pytest.raises(mr.InvalidParameterError):
            c.add_gate(7, 0, 1)


class TestOrTree:
    def test_singleton_is_identity(self):
        c = mr.new_circuit(2)
        w = c.input_wire(1, 1)
        assert mr.or_tree(c, [w]) == w
        assert c.gate_count == 0

    def test_six_wires_depth_three(self):
        c = mr.new_circuit(3)
        out = mr.or_tree(c, list(range(6)))
        c.set_outputs([out])
        assert c.depth() == 3  # ceil(log2 6)

    def test_empty_rejected(self):
        c = mr.new_circuit(2)
        with pytest.raises(mr.InvalidParameterError):
            mr.or_tree(c, [])

    def test_eight_wires_matches_fold(self):
        # Oracle: a left fold of OR gates over the same wires.
        tree = mr.new_circuit(3)
        tree.set_outputs([mr.or_tree(tree, list(range(8)))])
        fold = mr.new_circuit(3)
        fold.set_outputs([reduce(lambda a, b: fold.add_gate(OR, a, b), range(8))])
        for one_hot in range(9):
            bits = [0] * 9
            if one_hot < 8:
                bits[one_hot] = 1
            m = AdjacencyMatrix(3, [bits[0] | bits[1] << 1 | bits[2] << 2,
                                    bits[3] | bits[4] << 1 | bits[5] << 2,
                                    bits[6] | bits[7] << 1 | bits[8] << 2])
            assert tree.evaluate(m) == fold.evaluate(m)
            if one_hot < 8:
                assert tree.evaluate(m) == 1


class TestBoolMatrixProduct:
    def test_single_vertex(self):
        c = mr.new_circuit(1)
        a = input_matrix(c)
        prod = bool_matrix_product(c, a, a)
        c.set_outputs([prod.entry(1, 1)])
        assert c.gate_count == 1
        assert c.depth() == 1

    def test_added_depth_n4(self):
        c = mr.new_circuit(4)
        a = input_matrix(c)
        prod = bool_matrix_product(c, a, a)
        c.set_outputs([prod.entry(i, j) for i in range(1, 5) for j in range(1, 5)])
        assert c.depth() == 3  # 1 + ceil(log2 4)

    def test_matches_brute_force_product(self):
        def oracle_product(x, y, n):
            return [
                [any(x[i][k] and y[k][j] for k in range(n)) for j in range(n)]
                for i in range(n)
            ]

        c = mr.new_circuit(3)
        a = input_matrix(c)
        sq = bool_matrix_product(c, a, a)
        cube = bool_matrix_product(c, sq, a)
        c.set_outputs(
            [sq.entry(i, j) for i in range(1, 4) for j in range(1, 4)]
            + [cube.entry(i, j) for i in range(1, 4) for j in range(1, 4)]
        )
        for t in (0, 5, 73, 218, 511, 340, 129):
            m = AdjacencyMatrix(3, [(t >> (3 * i)) & 7 for i in range(3)])
            bits = [[m.entry(i + 1, j + 1) for j in range(3)] for i in range(3)]
            want_sq = oracle_product(bits, bits, 3)
            want_cube = oracle_product(want_sq, bits, 3)
            got = c.evaluate_all(m)
            for i in range(3):
                for j in range(3):
                    assert got[3 * i + j] == int(want_sq[i][j])
                    assert got[9 + 3 * i + j] == int(want_cube[i][j])

    def test_dimension_mismatch(self):
        c = mr.new_circuit(2)
        a = input_matrix(c)
        other = mr.new_circuit(2)
        with pytest.raises(mr.InvalidParameterError):
            bool_matrix_product(c, a, input_matrix(other))


class TestEvaluate:
    def test_projection(self):
        c = mr.new_circuit(2)
        c.set_outputs([c.input_wire(1, 2)])
        assert c.evaluate(matrix_of(2, (1, 2))) == 1
        assert c.evaluate(matrix_of(2, (2, 1))) == 0

    def test_all_zero_matrix_gives_zero(self):
        for circuit in (mr.build_reach(3), mr.build_walk_power(3, 2), mr.build_reach_exact(3, 3)):
            got = circuit.evaluate_all(AdjacencyMatrix(3))
            assert set(got) == {0}

    def test_reach_on_small_path(self):
        c = mr.build_reach(3)
        assert c.evaluate(matrix_of(3, (1, 2), (2, 3))) == 1

    def test_dimension_mismatch(self):
        c = mr.build_reach(3)
        with pytest.raises(mr.InvalidParameterError):
            c.evaluate(AdjacencyMatrix(4))

    def test_single_output_required(self):
        c = mr.build_walk_power(2, 1)
        with pytest.raises(mr.InvalidParameterError):
            c.evaluate(AdjacencyMatrix(2))
        assert len(c.evaluate_all(AdjacencyMatrix(2))) == 4


class TestDepth:
    def test_no_gates(self):
        c = mr.new_circuit(2)
        c.set_outputs([c.input_wire(1, 2)])
        assert c.depth() == 0

    def test_single_gate(self):
        c = mr.new_circuit(2)
        c.set_outputs([c.add_gate(AND, 0, 1)])
        assert c.depth() == 1

    def test_reach_leq_4_3(self):
        # Two squarings at 1 + ceil(log2 4) levels each.
        assert mr.build_reach_leq(4, 3).depth() == 6


class TestValidate:
    def test_fresh_build_is_valid(self):
        assert mr.build_reach_leq(5, 4).validate() is None

    def test_forward_reference_caught(self):
        c = mr.build_reach_leq(4, 3)
        c._lefts[5] = c.num_inputs + 1 + 10  # corrupt gate 5 to point forward
        v = c.validate()
        assert v is not None and v.gate_index == 5

    def test_no_outputs_caught(self):
        c = mr.new_circuit(2)
        c.add_gate(AND, 0, 1)
        v = c.validate()
        assert v is not None and "output" in v.reason

    def test_bad_op_caught(self):
        c = mr.new_circuit(2)
        c.set_outputs([c.add_gate(AND, 0, 1)])
        c._ops[0] = 9
        v = c.validate()
        assert v is not None and v.gate_index == 0


class TestInvariants:
    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**16 - 1), st.integers(0, 2**16 - 1))
    def test_monotonicity(self, g_bits, h_bits):
        c = mr.build_reach(4)
        g = AdjacencyMatrix(4, [(g_bits >> (4 * i)) & 15 for i in range(4)])
        ug = AdjacencyMatrix(4, [((g_bits | h_bits) >> (4 * i)) & 15 for i in range(4)])
        assert c.evaluate(g) <= c.evaluate(ug)

    def test_depth_additivity(self):
        c = mr.new_circuit(4)
        a = input_matrix(c)
        p1 = bool_matrix_product(c, a, a)
        c.set_outputs([p1.entry(1, 4)])
        d1 = c.depth()
        p2 = bool_matrix_product(c, p1, p1)
        c.set_outputs([p2.entry(1, 4)])
        assert c.depth() == d1 + 3
        out = mr.or_tree(c, [p2.entry(i, 4) for i in range(1, 5)])
        c.set_outputs([out])
        assert c.depth() == d1 + 3 + 2

    def test_construction_determinism(self):
        a = mr.build_reach_leq(6, 5)
        b = mr.build_reach_leq(6, 5)
        assert bytes(a._ops) == bytes(b._ops)
        assert a._lefts.tobytes() == b._lefts.tobytes()
        assert a._rights.tobytes() == b._rights.tobytes()
        assert a.outputs == b.outputs


class TestTextFormat:
    def test_round_trip(self):
        c = mr.build_reach_leq(3, 2)
        text = mr.circuit_to_text(c)
        back = mr.circuit_from_text(text)
        assert mr.circuit_to_text(back) == text
        assert back.depth() == c.depth()
        assert back.gate_count == c.gate_count

    def test_header_and_layout(self):
        c = mr.new_circuit(2)
        c.set_outputs([c.add_gate(OR, 0, 3)])
        text = mr.circuit_to_text(c)
        assert text == "MCIRC 1 2\nG OR 0 3\nOUT 5\n"

    def test_bad_inputs_rejected(self):
        with pytest.raises(mr.InvalidParameterError):
            mr.circuit_from_text("MCIRC 2 4\nOUT 0\n")
        with pytest.raises(mr.InvalidParameterError):
            mr.circuit_from_text("MCIRC 1 2\nG NAND 0 1\nOUT 4\n")
        with pytest.raises(mr.InvalidParameterError):
            mr.circuit_from_text("MCIRC 1 2\nG OR 0 1\n")

    def test_file_round_trip(self, tmp_path):
        c = mr.build_reach_exact(4, 5)
        path = tmp_path / "c.mc"
        mr.write_circuit(c, path)
        back = mr.read_circuit(path)
        assert back.gate_count == c.gate_count
        assert back.depth() == c.depth()
        g = matrix_of(4, (1, 2), (2, 3), (3, 4), (4, 1))
        assert back.evaluate(g) == c.evaluate(g)

    @settings(max_examples=50, deadline=None)
    @given(st.data())
    def test_random_circuit_round_trip(self, data):
        n = data.draw(st.integers(1, 4))
        c = mr.new_circuit(n)
        for _ in range(data.draw(st.integers(0, 30))):
            op = data.draw(st.sampled_from([AND, OR]))
            a = data.draw(st.integers(0, c.num_wires - 1))
            b = data.draw(st.integers(0, c.num_wires - 1))
            c.add_gate(op, a, b)
        out_count = data.draw(st.integers(1, 3))
        c.set_outputs(data.draw(st.lists(
            st.integers(0, c.num_wires - 1), min_size=out_count, max_size=out_count)))
        text = mr.circuit_to_text(c)
        back = mr.circuit_from_text(text)
        assert mr.circuit_to_text(back) == text
        assert back.depth() == c.depth()
        g = AdjacencyMatrix(n, [data.draw(st.integers(0, (1 << n) - 1)) for _ in range(n)])
        assert back.evaluate_all(g) == c.evaluate_all(g)
