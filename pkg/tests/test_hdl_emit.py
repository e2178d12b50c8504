import re
from pathlib import Path

import pytest

from spudgrade.core import Thresholds
from spudgrade.hdl_emit import EmitConfig, InvalidConfig, check_structure, emit_pipeline, strip_comments

GOLDEN = Path(__file__).parent / "data" / "pipeline_default.v"


def extract(text):
    """Pull the configured constants back out of emitted Verilog."""
    body = strip_comments(text)
    t_blue = int(re.search(r"localparam \[8:0\] T_BLUE = 9'd(\d+);", body).group(1))
    m = re.search(r"localparam signed \[9:0\] T_DIFF = (-?)10'sd(\d+);", body)
    t_diff = int(m.group(2)) * (-1 if m.group(1) else 1)
    bits = int(re.search(r"localparam COUNTER_BITS = (\d+);", body).group(1))
    last = int(re.search(r"FRAME_LAST = \d+'d(\d+);", body).group(1))
    return t_blue, t_diff, bits, last


def test_default_matches_golden():
    assert emit_pipeline(EmitConfig()) == GOLDEN.read_text(encoding="utf-8")


def test_default_constants():
    text = emit_pipeline()
    assert extract(text) == (200, 20, 19, 307199)
    assert "reg  [18:0] roi_count" in text


def test_deterministic():
    assert emit_pipeline(EmitConfig()) == emit_pipeline(EmitConfig())


@pytest.mark.parametrize("t_blue, t_diff, w, h", [
    (0, -255, 1, 1),
    (256, 256, 8, 8),
    (180, -7, 320, 240),
    (201, 0, 1920, 1080),
])
def test_constants_round_trip(t_blue, t_diff, w, h):
    config = EmitConfig(Thresholds(t_blue, t_diff), w, h)
    text = emit_pipeline(config)
    assert extract(text) == (t_blue, t_diff, config.counter_bits, w * h - 1)
    assert check_structure(text) == []


def test_shift_compare_grade_and_no_arithmetic_heavy_ops():
    body = strip_comments(emit_pipeline())
    body = "\n".join(line for line in body.splitlines() if not line.startswith("`timescale"))
    assert "(green_ext << 1) > roi_ext" in body
    assert "(green_ext << 2) > roi_ext" in body
    assert "*" not in body and "/" not in body and "%" not in body
    for port in ("clk", "rst", "pixel_valid", "pixel_r", "pixel_g", "pixel_b", "grade"):
        assert re.search(rf"\b{port}\b", body)
    assert "output reg  [1:0]            grade" in body
    assert "s1_green ? MARKER_R : s1_r" in body


def test_structure_checker_catches_imbalance():
    good = emit_pipeline()
    assert check_structure(good) == []
    assert check_structure(good.replace("endmodule", "")) != []
    broken = good.replace("end else begin", "end else", 1)
    assert check_structure(broken) != []
    assert check_structure("module a; module b; endmodule endmodule") != []
    assert check_structure("module a (x; endmodule") != []


def test_invalid_config():
    with pytest.raises(InvalidConfig):
        EmitConfig(width=0)
    with pytest.raises(InvalidConfig):
        EmitConfig(module_name="1bad name")


def test_module_name():
    assert "module potato_top (" in emit_pipeline(EmitConfig(module_name="potato_top"))
