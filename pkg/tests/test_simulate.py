import numpy as np
import pytest

from layersched.mesh import solve_pmft, solve_relaxed
from layersched.model import NetworkKind, Schedule, Task, quadrant_mesh
from layersched.simulate import WTCP_RANGE, ZTCM_RANGE, evaluate_schedule, gen_network


class TestEvaluateSchedule:
    def test_replays_relaxed_lp_timing(self):
        for seed in range(6):
            net = gen_network(NetworkKind.MESH_QUADRANT, (2, 3), seed)
            task = Task(40)
            sched, timing = solve_relaxed(net, task)
            replay, volume = evaluate_schedule(net, task, sched)
            assert replay.overall == pytest.approx(timing.overall, rel=1e-6)
            assert volume == pytest.approx(sched.total_link_volume())

    def test_replays_integer_schedules(self):
        for seed in range(6):
            net = gen_network(NetworkKind.MESH_QUADRANT, (2, 2), seed)
            task = Task(24)
            res = solve_pmft(net, task)
            replay, volume = evaluate_schedule(net, task, res.schedule)
            assert replay.overall == pytest.approx(res.timing.overall, rel=1e-6)
            assert volume >= 2 * task.n * task.n - 1e-6

    def test_two_hop_chain_volume(self, chain3):
        sched = Schedule(cols=(0, 0, 4), flows={(0, 1): 32.0, (1, 2): 32.0})
        timing, volume = evaluate_schedule(chain3, Task(4), sched)
        assert volume == 64.0
        assert timing.overall == pytest.approx(128.0)

    def test_zero_task_all_zero(self, chain3):
        sched = Schedule(cols=(0, 0, 0), flows={})
        timing, volume = evaluate_schedule(chain3, Task(0), sched)
        assert timing.overall == 0.0 and volume == 0.0

    def test_conservation_violation_rejected(self, chain3):
        sched = Schedule(cols=(0, 2, 2), flows={(0, 1): 32.0, (1, 2): 5.0})
        with pytest.raises(ValueError):
            evaluate_schedule(chain3, Task(4), sched)

    def test_flow_off_topology_rejected(self, chain3):
        sched = Schedule(cols=(0, 2, 2), flows={(2, 0): 32.0})
        with pytest.raises(ValueError):
            evaluate_schedule(chain3, Task(4), sched)

    def test_volume_above_source_bound_unless_one_hop(self):
        # every unit consumed one hop from the source: equality
        net = quadrant_mesh(1, 2, [1.0, 1.0], [1.0])
        sched = Schedule(cols=(0, 4), flows={(0, 1): 32.0})
        _, volume = evaluate_schedule(net, Task(4), sched)
        assert volume == pytest.approx(32.0)


class TestGenNetwork:
    def test_same_seed_identical(self):
        for kind, dims in [
            (NetworkKind.STAR, 16),
            (NetworkKind.MESH_QUADRANT, (3, 3)),
            (NetworkKind.FULL_MESH, (3, 3)),
        ]:
            assert gen_network(kind, dims, 42) == gen_network(kind, dims, 42)

    def test_different_seeds_differ(self):
        a = gen_network(NetworkKind.STAR, 8, 1)
        b = gen_network(NetworkKind.STAR, 8, 2)
        assert a != b

    def test_star_shape(self):
        net = gen_network(NetworkKind.STAR, 16, 0)
        assert net.p == 17 and len(net.links) == 16
        assert net.children == tuple(range(1, 17))

    def test_draws_inside_ranges(self):
        samples_w, samples_z = [], []
        for seed in range(625):  # 10_000 child draws
            net = gen_network(NetworkKind.STAR, 16, seed)
            samples_w += [net.w(c) for c in net.children]
            samples_z += [net.z(0, c) for c in net.children]
        w = np.array(samples_w)
        z = np.array(samples_z)
        assert len(w) == 10_000
        assert w.min() >= WTCP_RANGE[0] and w.max() <= WTCP_RANGE[1]
        assert z.min() >= ZTCM_RANGE[0] and z.max() <= ZTCM_RANGE[1]
        assert w.mean() == pytest.approx(sum(WTCP_RANGE) / 2, rel=0.02)
        assert z.mean() == pytest.approx(sum(ZTCM_RANGE) / 2, rel=0.02)

    def test_bad_ranges_rejected(self):
        with pytest.raises(ValueError):
            gen_network(NetworkKind.STAR, 4, 0, wtcp_range=(0.2, 0.1))
        with pytest.raises(ValueError):
            gen_network(NetworkKind.MESH_QUADRANT, (0, 3), 0)
