from fractions import Fraction

import pytest
from pydantic import ValidationError

from src.api.schemas import ExperimentConfig
from src.errors import CapacityError
from src.services.experiment import CSV_COLUMNS, render_csv, resolve_constants, run_rejection_experiment
from src.services.file_parser import file_parser


def config(files, **overrides) -> ExperimentConfig:
    values = dict(code_path=files["triangle.code"], delta=Fraction(3, 4),
                  rates=[Fraction(0), Fraction(1, 3), Fraction(2, 3)], samples=4, seed=11)
    values.update(overrides)
    return ExperimentConfig(**values)


def test_default_constants_come_from_the_theorem(files):
    code = file_parser.read_code(files["triangle.code"])
    eps0, r = resolve_constants(code, config(files))
    assert eps0 == Fraction(1, 229376)
    assert r == Fraction(1, 229376)
    assert resolve_constants(code, config(files, r=Fraction(1, 8)))[1] == Fraction(1, 8)


def test_rows_are_ordered_and_complete(files):
    code = file_parser.read_code(files["triangle.code"])
    rows = run_rejection_experiment(code, config(files))
    assert [(row.grid_index, row.sample) for row in rows] == [(g, s) for g in range(3) for s in range(4)]
    for row in rows:
        assert row.seed == 11
        assert row.rej >= row.bound_rhs
        assert row.corrected_in_code


def test_clean_words_have_zero_rejection(files):
    code = file_parser.read_code(files["triangle.code"])
    rows = run_rejection_experiment(code, config(files, rates=[Fraction(0)]))
    assert all(row.rej == 0 and row.dist == 0 and row.corrector_flips == 0 for row in rows)


def test_results_do_not_depend_on_worker_count(files):
    code = file_parser.read_code(files["triangle.code"])
    serial = run_rejection_experiment(code, config(files, workers=1))
    parallel = run_rejection_experiment(code, config(files, workers=4))
    assert serial == parallel


def test_same_seed_reproduces_samples(files):
    code = file_parser.read_code(files["triangle.code"])
    first = run_rejection_experiment(code, config(files, rates=[Fraction(1, 2)], samples=20, seed=1))
    second = run_rejection_experiment(code, config(files, rates=[Fraction(1, 2)], samples=20, seed=1))
    assert first == second


def test_csv_layout(files):
    code = file_parser.read_code(files["triangle.code"])
    text = render_csv(run_rejection_experiment(code, config(files, rates=[Fraction(0)], samples=1)))
    lines = text.splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert lines[0] == "seed,rate,sample,dist,rej,bound_rhs,corrector_flips,corrected_in_code"
    assert lines[1] == "11,0,0,0,0,0,0,true"


@pytest.mark.parametrize(
    "overrides",
    [
        {"samples": 0},
        {"rates": []},
        {"rates": [Fraction(3, 2)]},
        {"workers": 0},
    ],
)
def test_config_validation(files, overrides):
    with pytest.raises(ValidationError):
        config(files, **overrides)


def test_corrector_capacity_error_keeps_the_other_rows(files, monkeypatch):
    def give_up(code, word, delta):
        raise CapacityError("bit-flip did not settle within 0 rounds", cap=0, requested=1)

    monkeypatch.setattr("src.services.experiment.bitflip_correct", give_up)
    code = file_parser.read_code(files["triangle.code"])
    rows = run_rejection_experiment(code, config(files, rates=[Fraction(0), Fraction(1, 2)], samples=3))
    assert len(rows) == 6
    assert all(row.corrector_flips is None and row.corrected_in_code is None for row in rows)
    assert all(row.dist is not None for row in rows)
    assert render_csv(rows).splitlines()[1].endswith(",,")
