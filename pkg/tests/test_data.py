"""Dataset ingestion, batching, container and metrics/config persistence."""

import gzip
import io
import struct

import numpy as np
import pytest

from conftest import write_idx_images, write_idx_labels

from milc.data import (
    Dataset,
    IdxFormatError,
    batch_iter,
    format_metrics_rows,
    load_idx_dataset,
    load_idx_images,
    load_idx_labels,
    normalize,
    parse_config_file,
    read_gauss_dataset,
    read_metrics_csv,
    write_gauss_dataset,
    write_metrics_csv,
)


class TestIdxImages:
    def test_hand_built_two_by_two(self, tmp_path):
        path = tmp_path / "img.idx"
        pixels = np.array([[[0, 255], [128, 64]]], dtype=np.uint8)
        write_idx_images(path, pixels)
        loaded = load_idx_images(path)
        assert loaded.shape == (1, 2, 2)
        np.testing.assert_array_equal(loaded[0], [[0, 255], [128, 64]])

    def test_label_magic_rejected_by_image_loader(self, tmp_path):
        path = tmp_path / "bad.idx"
        with open(path, "wb") as fh:
            fh.write(struct.pack(">II", 2049, 1))
            fh.write(b"\x03")
        with pytest.raises(IdxFormatError):
            load_idx_images(path)

    def test_truncated_payload_rejected(self, tmp_path):
        path = tmp_path / "short.idx"
        with open(path, "wb") as fh:
            fh.write(struct.pack(">IIII", 2051, 2, 2, 2))
            fh.write(b"\x00" * 7)
        with pytest.raises(IdxFormatError):
            load_idx_images(path)

    def test_oversized_payload_rejected(self, tmp_path):
        path = tmp_path / "long.idx"
        with open(path, "wb") as fh:
            fh.write(struct.pack(">IIII", 2051, 1, 2, 2))
            fh.write(b"\x00" * 5)
        with pytest.raises(IdxFormatError):
            load_idx_images(path)

    def test_gzip_transparent(self, tmp_path):
        plain = tmp_path / "img.idx"
        pixels = np.arange(8, dtype=np.uint8).reshape(2, 2, 2)
        write_idx_images(plain, pixels)
        packed = tmp_path / "img.idx.gz"
        packed.write_bytes(gzip.compress(plain.read_bytes()))
        np.testing.assert_array_equal(load_idx_images(packed), pixels)


class TestIdxLabels:
    def test_hand_built_pair(self, tmp_path):
        path = tmp_path / "lab.idx"
        with open(path, "wb") as fh:
            fh.write(struct.pack(">II", 2049, 2))
            fh.write(bytes([3, 1]))
        np.testing.assert_array_equal(load_idx_labels(path), [3, 1])

    def test_truncated_rejected(self, tmp_path):
        path = tmp_path / "lab.idx"
        with open(path, "wb") as fh:
            fh.write(struct.pack(">II", 2049, 3))
            fh.write(bytes([1, 2]))
        with pytest.raises(IdxFormatError):
            load_idx_labels(path)

    def test_image_magic_rejected(self, tmp_path):
        path = tmp_path / "lab.idx"
        pixels = np.zeros((1, 2, 2), dtype=np.uint8)
        write_idx_images(path, pixels)
        with pytest.raises(IdxFormatError):
            load_idx_labels(path)


class TestNormalize:
    def test_extremes_and_midpoint(self):
        raw = np.array([[[0, 255], [128, 10]]], dtype=np.uint8)
        flat = normalize(raw)
        assert flat.shape == (1, 4)
        assert flat[0, 0] == 0.0
        assert flat[0, 1] == 1.0
        assert flat[0, 2] == pytest.approx(0.5019607843137255, abs=1e-12)

    def test_range_always_unit_interval(self):
        rng = np.random.default_rng(56)
        raw = rng.integers(0, 256, size=(10, 3, 3)).astype(np.uint8)
        flat = normalize(raw)
        assert flat.min() >= 0.0 and flat.max() <= 1.0

    def test_row_major_flattening(self):
        raw = np.arange(4, dtype=np.uint8).reshape(1, 2, 2)
        np.testing.assert_allclose(normalize(raw)[0] * 255.0, [0, 1, 2, 3], atol=1e-12)


class TestBatchIter:
    def _dataset(self, n=10, width=3, classes=2, seed=57):
        rng = np.random.default_rng(seed)
        return Dataset(
            inputs=rng.random((n, width)),
            labels=rng.integers(0, classes, size=n),
            n_classes=classes,
            provenance="test",
        )

    def test_partition_sizes(self):
        ds = self._dataset(n=10)
        sizes = [b.batch_size for b in batch_iter(ds, 4, seed=0, epoch=1)]
        assert sizes == [4, 4, 2]

    def test_single_full_batch_is_permutation(self):
        ds = self._dataset(n=8)
        (batch,) = list(batch_iter(ds, 8, seed=1, epoch=1))
        order = np.lexsort(batch.inputs.T)
        base = np.lexsort(ds.inputs.T)
        np.testing.assert_array_equal(batch.inputs[order], ds.inputs[base])

    def test_every_sample_once_per_epoch(self):
        ds = self._dataset(n=23)
        seen = np.concatenate(
            [b.inputs for b in batch_iter(ds, 5, seed=2, epoch=4)], axis=0
        )
        assert seen.shape == ds.inputs.shape
        np.testing.assert_array_equal(
            np.sort(seen, axis=0), np.sort(ds.inputs, axis=0)
        )

    def test_same_seed_epoch_identical(self):
        ds = self._dataset()
        a = [b.inputs for b in batch_iter(ds, 4, seed=3, epoch=2)]
        b = [b.inputs for b in batch_iter(ds, 4, seed=3, epoch=2)]
        for x, y in zip(a, b):
            assert np.array_equal(x, y)

    def test_different_epochs_differ(self):
        ds = self._dataset(n=64)
        a = next(iter(batch_iter(ds, 64, seed=3, epoch=1))).inputs
        b = next(iter(batch_iter(ds, 64, seed=3, epoch=2))).inputs
        assert not np.array_equal(a, b)

    def test_invalid_batch_size_rejected(self):
        with pytest.raises(ValueError):
            list(batch_iter(self._dataset(), 0, seed=0, epoch=1))


class TestDatasetValidation:
    def test_out_of_range_inputs_rejected(self):
        with pytest.raises(ValueError):
            Dataset(np.array([[1.5]]), np.array([0]), 2, "test")

    def test_label_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            Dataset(np.array([[0.5]]), np.array([2]), 2, "test")

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            Dataset(np.zeros((0, 3)), np.zeros(0, dtype=int), 2, "test")


class TestGaussContainer:
    def test_roundtrip_bit_identical(self, tmp_path):
        rng = np.random.default_rng(58)
        x = rng.normal(size=(40, 3))
        labels = np.where(rng.random(40) < 0.4, -1, 1).astype(np.int8)
        path = tmp_path / "data.bin"
        write_gauss_dataset(path, x, labels, 0.4, np.array([1.0, 0.0, -0.5]),
                            np.eye(3), seed=9)
        loaded_x, loaded_labels, header = read_gauss_dataset(path)
        assert np.array_equal(loaded_x, x)
        assert np.array_equal(loaded_labels, labels)
        assert header["q"] == 0.4
        assert header["seed"] == 9
        np.testing.assert_array_equal(header["mu"], [1.0, 0.0, -0.5])

    def test_truncated_container_rejected(self, tmp_path):
        rng = np.random.default_rng(59)
        x = rng.normal(size=(5, 2))
        labels = np.ones(5, dtype=np.int8)
        path = tmp_path / "data.bin"
        write_gauss_dataset(path, x, labels, 0.5, np.zeros(2), np.eye(2), seed=0)
        path.write_bytes(path.read_bytes()[:-4])
        with pytest.raises(ValueError):
            read_gauss_dataset(path)

    def test_rewrite_byte_identical(self, tmp_path):
        rng = np.random.default_rng(60)
        x = rng.normal(size=(7, 1))
        labels = np.ones(7, dtype=np.int8)
        p1, p2 = tmp_path / "a.bin", tmp_path / "b.bin"
        for p in (p1, p2):
            write_gauss_dataset(p, x, labels, 0.5, np.ones(1), np.eye(1), seed=2)
        assert p1.read_bytes() == p2.read_bytes()


class TestConfigFile:
    def test_parse_values_and_comments(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text(
            "# full-line comment\n"
            "loss_kind = mil\n"
            "epochs = 77  # trailing comment\n"
            "\n"
            "learning_rate = 1e-3\n"
        )
        values = parse_config_file(path)
        assert values == {
            "loss_kind": "mil",
            "epochs": "77",
            "learning_rate": "1e-3",
        }

    def test_malformed_line_reports_location(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("loss_kind = mil\nnot a pair\n")
        with pytest.raises(ValueError, match=r":2:"):
            parse_config_file(path)

    def test_duplicate_key_rejected(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("epochs = 1\nepochs = 2\n")
        with pytest.raises(ValueError):
            parse_config_file(path)


class TestMetricsCsv:
    ROWS = [
        (1, "train", 0.5, 2.302585, -0.004999, 1.584061, 1.589060),
        (1, "test", 0.175, 2.067228, 0.119742, 1.551061, 1.431319),
    ]

    def test_header_and_precision(self):
        text = format_metrics_rows(self.ROWS)
        lines = text.split("\n")
        assert lines[0] == (
            "epoch,split,error_rate,loss_nats,mi_bits,h_y_bits,h_y_given_x_bits"
        )
        assert lines[1].startswith("1,train,0.500000,2.302585,")
        assert text.endswith("\n")
        assert "\r" not in text

    def test_logged_identity_exact_at_printed_precision(self):
        rng = np.random.default_rng(61)
        rows = []
        for epoch in range(1, 30):
            h_y = float(rng.uniform(0.0, 3.5))
            h_ygx = float(rng.uniform(0.0, 3.5))
            rows.append((epoch, "train", 0.1, 1.0, h_y - h_ygx, h_y, h_ygx))
        handle = io.StringIO(format_metrics_rows(rows))
        for row in read_metrics_csv(handle):
            want = f"{row['h_y_bits'] - row['h_y_given_x_bits']:.6f}"
            assert f"{row['mi_bits']:.6f}" == want

    def test_roundtrip(self, tmp_path):
        path = tmp_path / "metrics.csv"
        write_metrics_csv(path, self.ROWS)
        rows = read_metrics_csv(path)
        assert rows[0]["epoch"] == 1
        assert rows[0]["split"] == "train"
        assert rows[1]["error_rate"] == pytest.approx(0.175, abs=1e-9)

    def test_header_mismatch_rejected(self, tmp_path):
        path = tmp_path / "metrics.csv"
        path.write_text("epoch,split,oops\n")
        with pytest.raises(ValueError):
            read_metrics_csv(path)


class TestLoadIdxDataset:
    def test_combined_loader(self, idx_files):
        ds = load_idx_dataset(
            idx_files["train_images"], idx_files["train_labels"], n_classes=3
        )
        assert ds.n_samples == 200
        assert ds.n_features == 64
        assert ds.inputs.min() >= 0.0 and ds.inputs.max() <= 1.0

    def test_count_mismatch_rejected(self, tmp_path):
        img = tmp_path / "img.idx"
        lab = tmp_path / "lab.idx"
        write_idx_images(img, np.zeros((3, 2, 2), dtype=np.uint8))
        write_idx_labels(lab, np.zeros(2, dtype=np.uint8))
        with pytest.raises(ValueError):
            load_idx_dataset(img, lab, n_classes=2)
