"""Report serialization."""
import json

import numpy as np
import pandas as pd


class TestReports:
    def test_report_path(self, tmp_path):
        from superdense_pingpong.utils.reports import SUMMARY, report_path
        assert report_path(tmp_path, 'small', SUMMARY, 'json') == tmp_path / 'small_summary.json'

    def test_json_is_sorted_and_plain(self):
        from superdense_pingpong.utils.reports import to_json
        text = to_json({'b': np.int64(2), 'a': np.float64(0.5), 'c': np.array([1, 2])})
        assert text.endswith("\n")
        assert list(json.loads(text)) == ['a', 'b', 'c']
        assert json.loads(text)['c'] == [1, 2]

    def test_csv_table(self, tmp_path):
        from superdense_pingpong.utils.reports import write_table
        frame = pd.DataFrame({'gamma': [0.0, 0.5], 's_max': [0.0, 1.5]})
        path = write_table(frame, tmp_path / 'curve.csv', 'csv', columns=['s_max', 'gamma'])
        assert path.read_text() == "s_max,gamma\n0.0,0.0\n1.5,0.5\n"

    def test_json_table_maps_nan_to_null(self, tmp_path):
        from superdense_pingpong.utils.reports import write_table
        frame = pd.DataFrame({'gamma': [float('nan'), 0.25], 'aborted_reason': [None, 'detection']})
        rows = json.loads(write_table(frame, tmp_path / 'sweep.json', 'json').read_text())
        assert rows == [{'gamma': None, 'aborted_reason': None},
                        {'gamma': 0.25, 'aborted_reason': 'detection'}]

    def test_write_json_leaves_no_temp_files(self, tmp_path):
        from superdense_pingpong.utils.reports import write_json
        write_json({'runs': 3}, tmp_path / 'x_summary.json')
        assert [p.name for p in tmp_path.iterdir()] == ['x_summary.json']

    def test_failed_write_cleans_up(self, tmp_path, monkeypatch):
        """YAML snapshots and reports share one atomic writer."""
        import os

        import pytest

        from superdense_pingpong.utils.reports import write_text_atomic
        from superdense_pingpong.utils.scenario import write_yaml_atomic

        def refuse(src, dst):
            raise OSError("disk full")

        monkeypatch.setattr(os, 'replace', refuse)
        with pytest.raises(OSError):
            write_text_atomic(tmp_path / 'a_summary.json', '{}\n')
        with pytest.raises(OSError):
            write_yaml_atomic(tmp_path / 'a_config.yml', {'seed': 1})
        assert list(tmp_path.iterdir()) == []
