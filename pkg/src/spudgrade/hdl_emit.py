"""Emit the pixel-serial greening pipeline as one Verilog-2001 file.

The emitted design mirrors :mod:`spudgrade.stream_hw`: a compare stage, a
count/overlay stage and a frame-end grade stage. Grade limits are shift-compares,
so the design has no divider or multiplier. The output is checked structurally
only; it is not run through a vendor toolchain.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from spudgrade.core import SpudGradeError, Thresholds, counter_bits

_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


class InvalidConfig(SpudGradeError, ValueError):
    pass


@dataclass(frozen=True)
class EmitConfig:
    thresholds: Thresholds = field(default_factory=Thresholds)
    width: int = 640
    height: int = 480
    module_name: str = "green_pipeline"

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise InvalidConfig(f"frame dimensions must be positive, got {self.width}x{self.height}")
        if not _IDENT.match(self.module_name):
            raise InvalidConfig(f"{self.module_name!r} is not a Verilog identifier")

    @property
    def counter_bits(self) -> int:
        return counter_bits(self.width, self.height)

    @property
    def frame_pixels(self) -> int:
        return self.width * self.height


def _signed_literal(value: int, bits: int) -> str:
    return f"-{bits}'sd{-value}" if value < 0 else f"{bits}'sd{value}"


_TEMPLATE = """\
// Pixel-serial potato greening detector
// Generated by spudgrade; edit the generator, not this file.
// Frame {width}x{height} ({pixels} pixels), counter width {cb} bits.
// Latency: compare -> count/overlay -> grade (3 register stages).
// Grade encoding: 0 = not damaged, 1 = damaged (>25%), 2 = seriously damaged (>50%).

`timescale 1ns / 1ps

module {name} (
    input  wire                  clk,
    input  wire                  rst,
    input  wire                  pixel_valid,
    input  wire [7:0]            pixel_r,
    input  wire [7:0]            pixel_g,
    input  wire [7:0]            pixel_b,
    output reg                   overlay_valid,
    output reg  [7:0]            overlay_r,
    output reg  [7:0]            overlay_g,
    output reg  [7:0]            overlay_b,
    output reg                   grade_valid,
    output reg  [1:0]            grade,
    output reg  [{msb}:0]          roi_total,
    output reg  [{msb}:0]          green_total
);

    localparam COUNTER_BITS = {cb};
    localparam [{msb}:0] FRAME_LAST = {cb}'d{last};
    localparam [8:0] T_BLUE = 9'd{t_blue};
    localparam signed [9:0] T_DIFF = {t_diff};
    localparam [7:0] MARKER_R = 8'd{mr};
    localparam [7:0] MARKER_G = 8'd{mg};
    localparam [7:0] MARKER_B = 8'd{mb};

    // comparators: b < T_BLUE, (r - g) < T_DIFF on a signed 9-bit difference
    wire              in_roi   = {{1'b0, pixel_b}} < T_BLUE;
    wire signed [8:0] diff_rg  = $signed({{1'b0, pixel_r}}) - $signed({{1'b0, pixel_g}});
    wire              is_green = in_roi && ($signed({{diff_rg[8], diff_rg}}) < T_DIFF);

    reg  [{msb}:0] pixel_count;
    wire        frame_last = pixel_valid && (pixel_count == FRAME_LAST);

    // stage 1: compare
    reg        s1_valid, s1_last, s1_roi, s1_green;
    reg  [7:0] s1_r, s1_g, s1_b;

    always @(posedge clk) begin
        if (rst) begin
            pixel_count <= {{COUNTER_BITS{{1'b0}}}};
            s1_valid    <= 1'b0;
            s1_last     <= 1'b0;
            s1_roi      <= 1'b0;
            s1_green    <= 1'b0;
        end else begin
            s1_valid <= pixel_valid;
            s1_last  <= frame_last;
            s1_roi   <= pixel_valid && in_roi;
            s1_green <= pixel_valid && is_green;
            s1_r     <= pixel_r;
            s1_g     <= pixel_g;
            s1_b     <= pixel_b;
            if (pixel_valid) begin
                if (frame_last)
                    pixel_count <= {{COUNTER_BITS{{1'b0}}}};
                else
                    pixel_count <= pixel_count + 1'b1;
            end
        end
    end

    // stage 2: count and overlay mux
    reg  [{msb}:0] roi_count, green_count;
    reg  [{msb}:0] roi_final, green_final;
    reg         s2_last;
    wire [{msb}:0] roi_next   = roi_count + s1_roi;
    wire [{msb}:0] green_next = green_count + s1_green;

    always @(posedge clk) begin
        if (rst) begin
            roi_count     <= {{COUNTER_BITS{{1'b0}}}};
            green_count   <= {{COUNTER_BITS{{1'b0}}}};
            roi_final     <= {{COUNTER_BITS{{1'b0}}}};
            green_final   <= {{COUNTER_BITS{{1'b0}}}};
            s2_last       <= 1'b0;
            overlay_valid <= 1'b0;
        end else begin
            overlay_valid <= s1_valid;
            overlay_r     <= s1_green ? MARKER_R : s1_r;
            overlay_g     <= s1_green ? MARKER_G : s1_g;
            overlay_b     <= s1_green ? MARKER_B : s1_b;
            s2_last       <= s1_last;
            if (s1_last) begin
                roi_final   <= roi_next;
                green_final <= green_next;
                roi_count   <= {{COUNTER_BITS{{1'b0}}}};
                green_count <= {{COUNTER_BITS{{1'b0}}}};
            end else begin
                roi_count   <= roi_next;
                green_count <= green_next;
            end
        end
    end

    // stage 3: frame-end grade, shift-compare only
    wire [COUNTER_BITS+1:0] green_ext    = {{2'b00, green_final}};
    wire [COUNTER_BITS+1:0] roi_ext      = {{2'b00, roi_final}};
    wire                    over_half    = (green_ext << 1) > roi_ext;
    wire                    over_quarter = (green_ext << 2) > roi_ext;

    always @(posedge clk) begin
        if (rst) begin
            grade_valid <= 1'b0;
            grade       <= 2'd0;
            roi_total   <= {{COUNTER_BITS{{1'b0}}}};
            green_total <= {{COUNTER_BITS{{1'b0}}}};
        end else begin
            grade_valid <= s2_last;
            if (s2_last) begin
                roi_total   <= roi_final;
                green_total <= green_final;
                if (over_half)
                    grade <= 2'd2;
                else if (over_quarter)
                    grade <= 2'd1;
                else
                    grade <= 2'd0;
            end
        end
    end

endmodule
"""


def emit_pipeline(config: EmitConfig = EmitConfig()) -> str:
    t = config.thresholds
    cb = config.counter_bits
    return _TEMPLATE.format(
        name=config.module_name,
        width=config.width,
        height=config.height,
        pixels=config.frame_pixels,
        cb=cb,
        msb=cb - 1,
        last=config.frame_pixels - 1,
        t_blue=t.t_blue,
        t_diff=_signed_literal(t.t_diff, 10),
        mr=t.marker.r,
        mg=t.marker.g,
        mb=t.marker.b,
    )


_COMMENT = re.compile(r"//[^\n]*|/\*.*?\*/", re.S)
_WORD = re.compile(r"\b(begin|end|module|endmodule)\b")


def strip_comments(text: str) -> str:
    return _COMMENT.sub("", text)


def check_structure(text: str) -> list[str]:
    """Token-level balance check. Returns a list of problems, empty when balanced."""
    problems = []
    body = strip_comments(text)
    stack = []
    for match in _WORD.finditer(body):
        word = match.group(1)
        line = body.count("\n", 0, match.start()) + 1
        if word in ("begin", "module"):
            if word == "module" and stack:
                problems.append(f"line {line}: nested module")
            stack.append((word, line))
        else:
            opener = "begin" if word == "end" else "module"
            if not stack or stack[-1][0] != opener:
                problems.append(f"line {line}: unmatched '{word}'")
            else:
                stack.pop()
    for word, line in stack:
        problems.append(f"line {line}: '{word}' never closed")
    for open_ch, close_ch in ("()", "[]", "{}"):
        depth = 0
        for ch in body:
            depth += (ch == open_ch) - (ch == close_ch)
            if depth < 0:
                break
        if depth != 0:
            problems.append(f"unbalanced '{open_ch}{close_ch}'")
    return problems
