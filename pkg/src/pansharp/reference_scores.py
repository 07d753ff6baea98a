"""Published benchmark scores bundled as report-formatter fixtures.

Quality scores of five classic pansharpening methods on three satellite
scenes (two Worldview scenes and one Quickbird scene, 512x512 PAN against
128x128 MS). The underlying imagery is not distributed, so these rows
exist only to exercise report formatting and best-per-column marking;
they are never used as numeric ground truth for the algorithms.
"""

from __future__ import annotations

from .bench import BenchmarkReport, MethodRow, best_per_metric
from .metrics import MetricReport

__all__ = ["reference_reports", "REFERENCE_METHOD_IDS"]

REFERENCE_METHOD_IDS = ("brovey", "ihs", "adaptive_ihs", "pca", "dwt_atrous")

# Scene -> metric -> one value per method, in REFERENCE_METHOD_IDS order.
_SCENES = {
    "worldview-urban": {
        "cc": (0.8909, 0.8922, 0.8941, 0.8917, 0.9306),
        "ergas": (4.1140, 7.1312, 7.0991, 8.3854, 6.0464),
        "quality": (0.8904, 0.8922, 0.8940, 0.7789, 0.9282),
        "rase": (28.5199, 28.5126, 28.4608, 33.5569, 24.1675),
        "rmse": (26.4290, 26.4381, 26.3901, 31.1155, 22.4092),
        "scc": (0.9907, 0.9986, 0.9815, 0.9862, 0.9095),
    },
    "worldview-seaside": {
        "cc": (0.8286, 0.8288, 0.8759, 0.8283, 0.9393),
        "ergas": (8.1074, 7.6741, 6.4912, 8.0171, 4.6738),
        "quality": (0.8277, 0.8288, 0.8758, 0.7213, 0.9387),
        "rase": (31.0202, 30.6398, 26.0137, 32.0135, 18.6590),
        "rmse": (27.2404, 26.9064, 22.8440, 28.1128, 16.3854),
        "scc": (0.9963, 0.9988, 0.9170, 0.9877, 0.7236),
    },
    "quickbird": {
        "cc": (0.7335, 0.7605, 0.8908, 0.8039, 0.9522),
        "ergas": (5.0523, 5.1351, 3.4613, 5.0980, 2.3865),
        "quality": (0.7237, 0.7600, 0.8902, 0.7317, 0.9512),
        "rase": (22.6808, 20.3282, 13.6959, 19.5795, 9.4678),
        "rmse": (13.9451, 12.4986, 8.4208, 12.0383, 5.8212),
        "scc": (0.9435, 0.9761, 0.7287, 0.8942, 0.6996),
    },
}


def reference_reports() -> dict[str, BenchmarkReport]:
    """The three bundled scenes as ready-made BenchmarkReports."""
    out = {}
    for scene, table in _SCENES.items():
        rows = []
        for i, method in enumerate(REFERENCE_METHOD_IDS):
            metrics = MetricReport(
                per_band=(),
                cc=table["cc"][i],
                ergas=table["ergas"][i],
                quality=table["quality"][i],
                rase=table["rase"][i],
                rmse=table["rmse"][i],
                scc=table["scc"][i],
                ratio_h_over_l=0.25,
            )
            rows.append(
                MethodRow(method=method, metrics=metrics, synthesis=None, error=None)
            )
        rows = tuple(rows)
        out[scene] = BenchmarkReport(
            dataset=scene,
            rows=rows,
            best_per_metric=best_per_metric(rows),
            runtimes={},
        )
    return out
