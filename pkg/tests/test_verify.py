import pytest

from adaptcha.challenge.audio import generate_audio_challenge
from adaptcha.challenge.difficulty import DifficultyLevel
from adaptcha.challenge.grid import generate_grid_challenge
from adaptcha.challenge.verify import (
    AudioSolution,
    GridSolution,
    SolutionError,
    verify_solution,
)


@pytest.fixture
def grid():
    ch = generate_grid_challenge(42, DifficultyLevel(2), time_limit_s=30.0)
    return ch


@pytest.fixture
def audio():
    return generate_audio_challenge(7, DifficultyLevel(1), time_limit_s=30.0)


def test_exact_match_correct(grid):
    r = verify_solution(grid, GridSolution(frozenset(grid.target_indices)), 5.0)
    assert r.correct and r.within_limit and r.elapsed_s == 5.0


def test_subset_is_not_correct(grid):
    subset = frozenset(list(grid.target_indices)[:-1])
    assert not verify_solution(grid, GridSolution(subset), 5.0).correct


def test_superset_is_not_correct(grid):
    extra = next(i for i in range(9) if i not in grid.target_indices)
    superset = grid.target_indices | {extra}
    assert not verify_solution(grid, GridSolution(superset), 5.0).correct


def test_audio_normalization_tolerant(audio):
    messy = "  " + audio.expected_transcript.upper().replace(" ", "   ") + " "
    assert verify_solution(audio, AudioSolution(messy), 3.0).correct


def test_audio_wrong_transcript(audio):
    assert not verify_solution(audio, AudioSolution("completely wrong"), 3.0).correct


def test_within_limit_boundary(grid):
    sol = GridSolution(frozenset(grid.target_indices))
    assert verify_solution(grid, sol, 30.0).within_limit
    assert not verify_solution(grid, sol, 30.0001).within_limit


def test_variant_mismatch_rejected(grid, audio):
    with pytest.raises(SolutionError):
        verify_solution(grid, AudioSolution("three"), 1.0)
    with pytest.raises(SolutionError):
        verify_solution(audio, GridSolution(frozenset({1})), 1.0)


def test_duplicate_indices_rejected():
    with pytest.raises(SolutionError):
        GridSolution.of([1, 1, 4])


def test_out_of_range_index_rejected():
    with pytest.raises(SolutionError):
        GridSolution.of([0, 9])


def test_empty_transcript_rejected():
    with pytest.raises(SolutionError):
        AudioSolution.of("   ")


def test_negative_elapsed_rejected(grid):
    with pytest.raises(SolutionError):
        verify_solution(grid, GridSolution(frozenset(grid.target_indices)), -0.1)
