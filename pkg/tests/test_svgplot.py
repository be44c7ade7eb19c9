"""Hand-emitted SVG curve rendering."""

import xml.etree.ElementTree as ET

from covstruct.svgplot import PALETTE, render_pcc_svg

SERIES = [
    ("aic", [(20, 0.5), (30, 0.8), (45, 0.95)]),
    ("gic:2", [(20, 0.4), (30, 0.7), (45, 0.9)]),
    ("asymptotic-bic", [(20, 0.9), (30, 1.0), (45, 1.0)]),
]


def test_svg_is_well_formed_xml():
    root = ET.fromstring(render_pcc_svg(SERIES, "curves"))
    assert root.tag.endswith("svg")


def tags(svg_text, name):
    root = ET.fromstring(svg_text)
    return [el for el in root.iter() if el.tag.endswith(name)]


def test_one_polyline_per_series():
    svg = render_pcc_svg(SERIES, "curves")
    polylines = tags(svg, "polyline")
    assert len(polylines) == len(SERIES)
    # One marker per data point on top of the lines.
    assert len(tags(svg, "circle")) == sum(len(pts) for _n, pts in SERIES)


def test_palette_assigns_distinct_colors():
    svg = render_pcc_svg(SERIES, "curves")
    colors = [el.attrib["stroke"] for el in tags(svg, "polyline")]
    assert colors == list(PALETTE[: len(SERIES)])
    assert len(set(colors)) == len(SERIES)


def test_axis_spans_zero_to_one():
    svg = render_pcc_svg(SERIES, "curves")
    labels = {el.text for el in tags(svg, "text")}
    for tick in ("0.0", "0.5", "1.0"):
        assert tick in labels
    # Tick marks for every K present in the series.
    for k in ("20", "30", "45"):
        assert k in labels
    assert "P_cc" in labels and "K (secondary snapshots)" in labels


def test_title_and_labels_are_escaped():
    series = [("a<b&c", [(10, 0.5), (20, 0.6)])]
    svg = render_pcc_svg(series, 'truth <H1> & "friends"')
    assert "&lt;H1&gt; &amp;" in svg
    assert "a&lt;b&amp;c" in svg
    labels = {el.text for el in tags(svg, "text")}
    assert "a<b&c" in labels  # parses back to the raw label


def test_empty_series_still_renders():
    svg = render_pcc_svg([], "empty")
    assert len(tags(svg, "polyline")) == 0
    assert tags(svg, "rect")


def test_points_plotted_in_given_order():
    svg = render_pcc_svg([("aic", [(20, 0.0), (45, 1.0)])], "span")
    polyline = tags(svg, "polyline")[0]
    first, last = polyline.attrib["points"].split()
    x0, y0 = map(float, first.split(","))
    x1, y1 = map(float, last.split(","))
    assert x0 < x1  # K ascending maps left to right
    assert y0 > y1  # p_cc = 1 sits higher (smaller SVG y) than p_cc = 0
