import numpy as np
import pytest

from vertseg.errors import (
    ConfigError,
    DimensionMismatch,
    EmptyInput,
    MissingTruth,
    SingleClass,
)
from vertseg.metrics import REPORT_CSV_HEADER
from vertseg.morphology import COMPONENT_CSV_HEADER
from vertseg.phantom import PhantomSpec, generate_phantom
from vertseg.pipeline import (
    PipelineConfig,
    parse_config,
    run_benchmark,
    run_pipeline,
)
from vertseg.raster import read_pgm, read_ppm


@pytest.fixture(scope="module")
def clean_case():
    img, truth, names = generate_phantom(PhantomSpec())
    return img, truth, names


SMALL = dict(width=96, height=96, num_bodies=3, body_width=24, body_height=14, gap=8)


class TestConfig:
    def test_empty_text_gives_defaults(self):
        assert parse_config("") == PipelineConfig()

    def test_comments_and_overrides(self):
        text = """
        # comment line
        methods = fcm, otsu   # trailing comment
        fcm.clusters = 4
        morpho.aspect_high = 2.5
        out = results
        vertebra_cluster = 2
        """
        cfg = parse_config(text)
        assert cfg.methods == ("fcm", "otsu")
        assert cfg.fcm_clusters == 4
        assert cfg.morpho_aspect_high == 2.5
        assert cfg.out_dir == "results"
        assert cfg.vertebra_cluster == 2

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError):
            parse_config("fcm.lusters = 3")

    def test_bad_value_rejected(self):
        with pytest.raises(ConfigError):
            parse_config("fcm.clusters = many")
        with pytest.raises(ConfigError):
            parse_config("methods = fcm, svm")
        with pytest.raises(ConfigError):
            parse_config("just a line")

    def test_invalid_method_set(self):
        with pytest.raises(ConfigError):
            PipelineConfig(methods=())

    def test_nested_validation_surface(self):
        with pytest.raises(ConfigError):
            run_pipeline(np.zeros((4, 4), np.uint8),
                         config=PipelineConfig(diffusion_step=0.5))


class TestRunPipeline:
    def test_clean_phantom_fcm(self, clean_case):
        img, truth, _ = clean_case
        result = run_pipeline(img, truth, method="fcm")
        assert sorted(result.names.values()) == ["L1", "L2", "L3", "L4", "L5"]
        assert result.report.dice >= 0.95
        assert result.report.method == "fcm"
        assert result.report.elapsed_seconds >= 0.0

    def test_constant_image_otsu_propagates(self):
        with pytest.raises(SingleClass):
            run_pipeline(np.full((32, 32), 9, np.uint8), method="otsu")

    def test_methods_share_report_schema(self, clean_case):
        img, truth, _ = clean_case
        fcm = run_pipeline(img, truth, method="fcm").report
        km = run_pipeline(img, truth, method="kmeans").report
        assert set(vars(fcm)) == set(vars(km))
        assert km.method == "kmeans"

    def test_metrics_need_truth_only_when_required(self, clean_case):
        img, _, _ = clean_case
        result = run_pipeline(img, method="fcm")
        assert result.report.dice is None and result.report.hausdorff is None
        with pytest.raises(MissingTruth):
            run_pipeline(img, method="fcm", require_truth=True)

    def test_truth_shape_checked(self, clean_case):
        img, _, _ = clean_case
        with pytest.raises(DimensionMismatch):
            run_pipeline(img, np.zeros((4, 4), bool), method="fcm")

    def test_unknown_method(self, clean_case):
        img, _, _ = clean_case
        with pytest.raises(ConfigError):
            run_pipeline(img, method="watershed")

    def test_artifacts_round_trip(self, clean_case, tmp_path):
        img, truth, _ = clean_case
        result = run_pipeline(img, truth, method="fcm", stem="case", out_dir=tmp_path)
        expected = {
            "mask": "case.fcm.mask.pgm",
            "labels": "case.fcm.labels.pgm",
            "overlay": "case.fcm.overlay.ppm",
            "components": "case.fcm.components.csv",
            "report": "case.fcm.report.csv",
        }
        for kind, name in expected.items():
            assert result.paths[kind].name == name
            assert result.paths[kind].is_file()
        mask = read_pgm(result.paths["mask"].read_bytes())
        assert np.array_equal(mask > 0, result.mask)
        labels = read_pgm(result.paths["labels"].read_bytes())
        assert np.array_equal(labels.astype(int), result.label_map)
        overlay = read_ppm(result.paths["overlay"].read_bytes())
        assert overlay.shape == img.shape + (3,)
        background = result.label_map == 0
        assert np.array_equal(overlay[background][:, 0], img[background])
        csv_lines = result.paths["components"].read_text().strip().split("\n")
        assert csv_lines[0] == COMPONENT_CSV_HEADER
        assert len(csv_lines) == len(result.components) + 1
        report_lines = result.paths["report"].read_text().strip().split("\n")
        assert report_lines[0] == REPORT_CSV_HEADER
        assert report_lines[1].startswith("fcm,")

    def test_deterministic_outputs(self, clean_case, tmp_path):
        img, truth, _ = clean_case
        a = run_pipeline(img, truth, method="fcm", stem="a", out_dir=tmp_path / "one")
        b = run_pipeline(img, truth, method="fcm", stem="a", out_dir=tmp_path / "two")
        for kind in ("mask", "labels", "overlay", "components"):
            assert a.paths[kind].read_bytes() == b.paths[kind].read_bytes()


class TestRunBenchmark:
    def test_empty_inputs(self):
        with pytest.raises(EmptyInput):
            run_benchmark([])

    def test_missing_truth(self):
        img, _, _ = generate_phantom(PhantomSpec(**SMALL))
        with pytest.raises(MissingTruth):
            run_benchmark([(img, None)])

    def test_tables_shape_and_sem(self, tmp_path):
        inputs = []
        for seed in range(3):
            img, truth, _ = generate_phantom(
                PhantomSpec(noise_sigma=6.0, bias_amplitude=0.15, seed=seed, **SMALL)
            )
            inputs.append((img, truth))
        result = run_benchmark(inputs, out_dir=tmp_path)
        for metric in ("dice", "hausdorff", "elapsed_seconds"):
            table = result.summaries[metric]
            assert set(table) == {"otsu", "kmeans", "fcm"}
            for stats in table.values():
                assert stats.n == 3
                assert stats.sem == pytest.approx(stats.sd / np.sqrt(3), abs=1e-12)
        bench = (tmp_path / "benchmark.csv").read_text().strip().split("\n")
        assert bench[0] == "label,n,mean,sd,sem"
        labels = [line.split(",")[0] for line in bench[1:]]
        assert labels == [
            "dice.otsu", "dice.kmeans", "dice.fcm",
            "hausdorff.otsu", "hausdorff.kmeans", "hausdorff.fcm",
        ]
        timing = (tmp_path / "timing.csv").read_text().strip().split("\n")
        assert [line.split(",")[0] for line in timing[1:]] == [
            "elapsed.otsu", "elapsed.kmeans", "elapsed.fcm",
        ]
        assert len(result.reports["fcm"]) == 3

    def test_method_subset_respected(self):
        img, truth, _ = generate_phantom(PhantomSpec(**SMALL))
        cfg = PipelineConfig(methods=("fcm",))
        result = run_benchmark([(img, truth)], cfg)
        assert set(result.reports) == {"fcm"}
