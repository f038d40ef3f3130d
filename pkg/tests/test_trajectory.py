import numpy as np
import pytest

from rlgames import (
    Bandit,
    Full,
    InputError,
    Schedule,
    builtin_game,
    distance_to_face,
    face_distances,
    face_from_lists,
    full_face,
    kernel_from_name,
    read_trajectory_csv,
    run,
    singleton_face,
    write_trajectory_csv,
)
from rlgames.trajectory import csv_header

LOGIT = kernel_from_name("logit")


@pytest.fixture(scope="module")
def vz():
    return builtin_game("vz4x4")


@pytest.fixture(scope="module")
def traj(vz):
    return run(vz, LOGIT, Full(), Schedule(0.2, 0.5), 80, seed=2)


@pytest.fixture(scope="module")
def bandit_traj(vz):
    fb = Bandit(exploration=Schedule(0.1, 0.15))
    return run(vz, LOGIT, fb, Schedule(0.2, 0.5), 80, seed=2)


def test_trajectory_layout(traj):
    assert traj.n_players == 2
    assert traj.dim == 8
    assert traj.horizon == 80
    assert traj.offsets == (0, 4, 8)
    assert traj.player_slice(1) == slice(4, 8)
    with pytest.raises(InputError):
        traj.player_slice(2)


def test_profile_views_match_rows(traj):
    prof = traj.profile_at(10)
    assert np.array_equal(prof[0], traj.x[10, :4])
    assert np.array_equal(prof[1], traj.x[10, 4:])
    last = traj.final_profile()
    assert np.array_equal(last[0], traj.x[-1, :4])
    prof[0][0] = 77.0  # views are copies
    assert traj.x[10, 0] != 77.0


def test_face_distances_agree_with_pointwise_distance(vz, traj):
    face = face_from_lists([[0, 2], [0, 2]])
    series = face_distances(traj, face)
    assert series.shape == (traj.horizon,)
    for k in (0, 7, 79):
        want = distance_to_face(vz, traj.profile_at(k), face)
        assert series[k] == pytest.approx(want, abs=1e-12)
    assert np.all(face_distances(traj, full_face(vz)) == 0.0)


def test_face_distances_validation(traj):
    with pytest.raises(InputError):
        face_distances(traj, face_from_lists([[0], [0], [0]]))
    with pytest.raises(InputError):
        face_distances(traj, face_from_lists([[0], [9]]))


def test_csv_header_contract(traj):
    assert csv_header(traj, 2) == [
        "n", "gamma", "tau",
        "x_0_0", "x_0_1", "x_0_2", "x_0_3",
        "x_1_0", "x_1_1", "x_1_2", "x_1_3",
        "realized_0", "realized_1",
        "regret_0", "regret_1",
        "dist_0", "dist_1",
    ]


def test_csv_round_trip_is_lossless(tmp_path, vz, traj):
    faces = [singleton_face(vz, (0, 0)), singleton_face(vz, (2, 2))]
    path = tmp_path / "t.csv"
    write_trajectory_csv(traj, path, faces=faces)
    cols = read_trajectory_csv(path)

    assert np.array_equal(cols["n"], traj.n)
    assert cols["n"].dtype == np.int64
    assert np.array_equal(cols["gamma"], traj.gamma)  # exact, 17 digits
    assert np.array_equal(cols["tau"], traj.tau)
    for i in range(2):
        for a in range(4):
            assert np.array_equal(cols[f"x_{i}_{a}"], traj.x[:, 4 * i + a])
        assert np.array_equal(cols[f"regret_{i}"], traj.gaps[:, i])
        assert np.array_equal(cols[f"dist_{i}"], face_distances(traj, faces[i]))


def test_csv_realized_is_minus_one_without_sampling(tmp_path, traj):
    path = tmp_path / "t.csv"
    write_trajectory_csv(traj, path)
    cols = read_trajectory_csv(path)
    assert np.all(cols["realized_0"] == -1)
    assert np.all(cols["realized_1"] == -1)
    assert cols["realized_0"].dtype == np.int64


def test_csv_records_bandit_actions(tmp_path, bandit_traj):
    path = tmp_path / "t.csv"
    write_trajectory_csv(bandit_traj, path)
    cols = read_trajectory_csv(path)
    for i in (0, 1):
        got = cols[f"realized_{i}"]
        assert np.array_equal(got, bandit_traj.realized[:, i])
        assert got.min() >= 0 and got.max() <= 3


def test_csv_text_shape(tmp_path, traj):
    path = tmp_path / "t.csv"
    write_trajectory_csv(traj, path, faces=[full_face(builtin_game("vz4x4"))])
    text = path.read_text()
    lines = text.splitlines()
    assert len(lines) == traj.horizon + 1
    assert text.endswith("\n")
    assert not text.endswith("\n\n")
    # every data row has the full column count
    width = len(lines[0].split(","))
    assert all(len(line.split(",")) == width for line in lines[1:])


def test_read_rejects_empty_and_ragged_files(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    with pytest.raises(InputError):
        read_trajectory_csv(empty)

    header_only = tmp_path / "h.csv"
    header_only.write_text("n,gamma,tau\n")
    with pytest.raises(InputError):
        read_trajectory_csv(header_only)

    ragged = tmp_path / "r.csv"
    ragged.write_text("n,gamma\n1,0.5,9\n")
    with pytest.raises(InputError):
        read_trajectory_csv(ragged)
