from pathlib import Path

import numpy as np
import pytest
import torch

from exporter_lib import LayerNotFound, NonMatrixLayer
from exporter_lib.daqt import HEADER, read_daqt, write_daqt
from exporter_lib.extract import export_weights
from exporter_lib.manifest import load_manifest
from exporter_lib.toymodel import load_checkpoint

import export_weights as export_weights_cli


class TestDaqtFormat:
    def test_roundtrip(self, tmp_path):
        arr = np.random.default_rng(5).normal(size=(3, 4)).astype(np.float32)
        path = str(tmp_path / "t.daqt")
        write_daqt(arr, path)
        assert np.array_equal(read_daqt(path), arr)

    def test_header_size(self, tmp_path):
        path = str(tmp_path / "t.daqt")
        write_daqt(np.zeros((2, 5), dtype=np.float32), path)
        assert Path(path).stat().st_size == HEADER.size + 2 * 5 * 4

    def test_rejects_nan(self, tmp_path):
        with pytest.raises(ValueError):
            write_daqt(np.array([[np.nan]]), str(tmp_path / "bad.daqt"))


class TestExportWeights:
    def test_exports_all_2d_layers(self, toy_checkpoint, tmp_path):
        ckpt, config = toy_checkpoint
        manifest = export_weights(ckpt, "net.*.weight", str(tmp_path))
        assert len(manifest.layers) == config["depth"]
        for name, path in manifest.layers.items():
            tensor = read_daqt(path)
            assert tensor.ndim == 2
            # file size is header + rows*cols*4
            expected = HEADER.size + tensor.size * 4
            assert Path(path).stat().st_size == expected

    def test_values_equal_after_widening(self, toy_checkpoint, tmp_path):
        ckpt, _ = toy_checkpoint
        manifest = export_weights(ckpt, "net.0.weight", str(tmp_path))
        _, state_dict = load_checkpoint(ckpt)
        exported = read_daqt(manifest.layers["net.0.weight"])
        reference = state_dict["net.0.weight"].to(torch.float32).numpy()
        assert np.array_equal(exported, reference)  # f16 -> f32 is exact

    def test_filter_matching_nothing(self, toy_checkpoint, tmp_path):
        ckpt, _ = toy_checkpoint
        with pytest.raises(LayerNotFound):
            export_weights(ckpt, "does.not.exist*", str(tmp_path))

    def test_non_matrix_layer_rejected(self, toy_checkpoint, tmp_path):
        ckpt, _ = toy_checkpoint
        with pytest.raises(NonMatrixLayer):
            export_weights(ckpt, "net.*.bias", str(tmp_path))

    def test_manifest_lists_valid_files(self, toy_checkpoint, tmp_path):
        ckpt, config = toy_checkpoint
        export_weights(ckpt, "net.*.weight", str(tmp_path))
        manifest = load_manifest(str(tmp_path / "manifest.json"))
        assert len(manifest.layers) == config["depth"]
        names = sorted(manifest.layers)
        assert names == sorted(set(names)), "each layer appears exactly once"

    def test_raw_state_dict_checkpoint(self, tmp_path):
        raw = {"blk.w": torch.randn(4, 6), "blk.v": torch.randn(3, 3)}
        ckpt = str(tmp_path / "raw.pt")
        torch.save(raw, ckpt)
        manifest = export_weights(ckpt, "blk.*", str(tmp_path / "out"))
        assert set(manifest.layers) == {"blk.w", "blk.v"}

    def test_cli(self, toy_checkpoint, tmp_path, capsys):
        ckpt, _ = toy_checkpoint
        rc = export_weights_cli.main([
            "--model", ckpt, "--layers", "net.*.weight",
            "--out-dir", str(tmp_path),
        ])
        assert rc == 0
        assert "net.0.weight" in capsys.readouterr().out
        assert (tmp_path / "manifest.json").exists()

    def test_cli_error_exit(self, toy_checkpoint, tmp_path, capsys):
        ckpt, _ = toy_checkpoint
        rc = export_weights_cli.main([
            "--model", ckpt, "--layers", "nope*", "--out-dir", str(tmp_path),
        ])
        assert rc == 2
        assert "error" in capsys.readouterr().err
