import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from layersched.model import (
    Link,
    MalformedNetwork,
    NetworkKind,
    NetworkModel,
    Processor,
    Schedule,
    Task,
    Timing,
    compute_load,
    full_mesh,
    lbp_source_volume,
    network_from_json,
    network_to_json,
    per_processor_volume,
    quadrant_mesh,
    star_network,
    validate_schedule,
)


class TestVolumeFormulas:
    def test_source_volume(self):
        assert lbp_source_volume(Task(8)) == 128
        assert lbp_source_volume(Task(1)) == 2
        assert lbp_source_volume(Task(1000)) == 2_000_000

    def test_per_processor_volume(self):
        assert per_processor_volume(Task(8), 4) == 64
        assert per_processor_volume(Task(8), 0) == 0
        # 3 columns of one operand (15 entries) + 3 rows of the other (15)
        assert per_processor_volume(Task(5), 3) == 30

    def test_compute_load(self):
        assert compute_load(Task(8), 2) == 128
        assert compute_load(Task(8), 0) == 0
        assert compute_load(Task(3), 3) == 27

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            per_processor_volume(Task(4), 5)
        with pytest.raises(ValueError):
            compute_load(Task(4), -1)

    @given(st.integers(1, 400), st.integers(1, 12), st.data())
    @settings(max_examples=200, derandomize=True)
    def test_complete_schedule_conservation(self, n, p, data):
        """Any complete split hits the source volume and total work exactly."""
        cuts = sorted(
            data.draw(st.lists(st.integers(0, n), min_size=p - 1, max_size=p - 1))
        )
        shares = [b - a for a, b in zip([0] + cuts, cuts + [n])]
        task = Task(n)
        assert sum(shares) == n
        assert sum(per_processor_volume(task, s) for s in shares) == lbp_source_volume(task)
        assert sum(compute_load(task, s) for s in shares) == n**3


class TestTypes:
    def test_task_rejects_negative(self):
        with pytest.raises(ValueError):
            Task(-1)
        Task(0)  # degenerate empty job is allowed

    def test_processor_validation(self):
        with pytest.raises(ValueError):
            Processor(0, 0.0)
        with pytest.raises(ValueError):
            Processor(0, 1.0, storage=0.0)
        assert math.isinf(Processor(0, 1.0).storage)

    def test_link_validation(self):
        with pytest.raises(ValueError):
            Link(1, 1, 1.0)
        with pytest.raises(ValueError):
            Link(0, 1, -2.0)

    def test_timing_rejects_inverted(self):
        with pytest.raises(ValueError):
            Timing(start=(1.0,), finish=(0.5,), overall=0.5)


class TestNetworkStructure:
    def test_star_shape(self):
        net = star_network([1, 2], [3, 4])
        assert net.p == 3
        assert net.source == 0
        assert net.children == (1, 2)
        assert net.z(0, 2) == 4
        assert net.topo_order() == (0, 1, 2)

    def test_quadrant_shape(self):
        net = quadrant_mesh(2, 3, [1] * 6, [1] * 7)
        assert net.edge_list == ((0, 1), (0, 3), (1, 2), (1, 4), (2, 5), (3, 4), (4, 5))
        assert net.grid_pos(4) == (1, 1)
        order = net.topo_order()
        for (i, j) in net.edge_list:
            assert order.index(i) < order.index(j)

    def test_full_mesh_has_both_directions(self):
        net = full_mesh(2, 2, [1] * 4, [1] * 4)
        assert (0, 1) in net.edge_index and (1, 0) in net.edge_index
        with pytest.raises(MalformedNetwork):
            net.topo_order()  # cyclic by construction

    def test_malformed_star(self):
        with pytest.raises(MalformedNetwork):
            NetworkModel(
                kind=NetworkKind.STAR,
                processors=(Processor(0, 1.0), Processor(1, 1.0), Processor(2, 1.0)),
                links=(Link(0, 1, 1.0),),  # child 2 unreachable
                sources=frozenset({0}),
            )

    def test_malformed_quadrant_needs_corner_source(self):
        procs = tuple(Processor(i, 1.0) for i in range(4))
        links = (Link(0, 1, 1.0), Link(0, 2, 1.0), Link(1, 3, 1.0), Link(2, 3, 1.0))
        with pytest.raises(MalformedNetwork):
            NetworkModel(
                kind=NetworkKind.MESH_QUADRANT,
                processors=procs,
                links=links,
                sources=frozenset({1}),
                dims=(2, 2),
            )


class TestScheduleValidation:
    def test_valid_schedule_passes(self, chain3):
        sched = Schedule(cols=(0, 2, 2), flows={(0, 1): 32.0, (1, 2): 16.0})
        validate_schedule(chain3, Task(4), sched)

    def test_bad_total_rejected(self, chain3):
        sched = Schedule(cols=(0, 2, 1), flows={})
        with pytest.raises(ValueError):
            validate_schedule(chain3, Task(4), sched)

    def test_source_share_rejected(self, chain3):
        sched = Schedule(cols=(1, 2, 1), flows={})
        with pytest.raises(ValueError):
            validate_schedule(chain3, Task(4), sched)

    def test_flow_off_topology_rejected(self, chain3):
        sched = Schedule(cols=(0, 2, 2), flows={(2, 1): 5.0})
        with pytest.raises(ValueError):
            validate_schedule(chain3, Task(4), sched)

    def test_source_volume_integer_exact(self, chain3):
        sched = Schedule(cols=(0, 2, 2), flows={})
        vol = sched.source_volume(chain3, Task(4))
        assert isinstance(vol, int) and vol == 32


class TestJsonFixtures:
    def test_round_trip(self):
        net = quadrant_mesh(2, 2, [1.0, 2.0, 3.0, 4.0], [0.1, 0.2, 0.3, 0.4],
                            t_cp=2.0, t_cm=3.0, storage=[math.inf, 50.0, math.inf, 60.0])
        doc = network_to_json(net)
        assert doc["kind"] == "MeshQuadrant"
        assert doc["links"][0] == {"from": 0, "to": 1, "z": 0.1}
        assert doc["processors"][1]["storage"] == 50.0
        assert doc["processors"][0]["storage"] is None
        again = network_from_json(json.loads(json.dumps(doc)))
        assert again == net

    def test_star_round_trip(self):
        net = star_network([1.0, 0.5], [0.2, 0.3])
        assert network_from_json(network_to_json(net)) == net
