import json
import threading

import pytest

from protorail import (
    Config,
    Engine,
    Fragment,
    MarketPhase,
    CompetitivePosition,
    ProtocolError,
    Readiness,
    ExternalWindow,
    SourceKind,
    Store,
    TimingGrid,
    evaluate_timing_grid,
    load_config,
    shallow_ghost_warning,
    vision_to_readiness,
)
from protorail.config import GENERATOR_TIMEOUT_ENV, GENERATOR_URL_ENV
from protorail.serialize import parse_signal


class TestConfigFile:
    def write(self, tmp_path, body):
        path = tmp_path / "config.json"
        path.write_text(json.dumps(body), encoding="utf-8")
        return str(path)

    def test_shallow_threshold_is_a_knob(self, tmp_path):
        cfg = load_config(self.write(tmp_path, {"shallow_ghost_threshold": 0.1}), env={})
        fragment = Fragment(
            id="f1",
            text="rooftop farming yields data",
            domain_tag="agriculture",
            source_kind=SourceKind.OBSERVATION,
        )
        ghost = "a boundary where farming care compounds across households"
        assert shallow_ghost_warning(fragment, ghost) == "none"
        assert shallow_ghost_warning(fragment, ghost, cfg) == "warn"

    def test_polarity_table_override_merges(self, tmp_path):
        cfg = load_config(
            self.write(tmp_path, {"polarity": {"market_phase": {"acceleration": 0}}}),
            env={},
        )
        grid = TimingGrid(
            MarketPhase.ACCELERATION,
            CompetitivePosition.FAST_FOLLOWER,
            Readiness.READY,
            ExternalWindow.OPEN,
        )
        assert evaluate_timing_grid(grid).polarity_sum == 4
        downgraded = evaluate_timing_grid(grid, cfg)
        assert downgraded.polarity_sum == 3
        # Untouched axes keep their defaults.
        assert cfg.polarity["readiness"]["ready"] == 1

    def test_readiness_mapping_override(self, tmp_path):
        cfg = load_config(self.write(tmp_path, {"readiness_ready_min": 5}), env={})
        from test_integration import vision_with_feasibility

        assert vision_to_readiness(vision_with_feasibility(4), cfg) is Readiness.PARTIALLY_READY
        assert vision_to_readiness(vision_with_feasibility(5), cfg) is Readiness.READY

    def test_generator_settings_from_env(self):
        cfg = load_config(
            env={GENERATOR_URL_ENV: "http://gen.local", GENERATOR_TIMEOUT_ENV: "2.5"}
        )
        assert cfg.generator_url == "http://gen.local"
        assert cfg.generator_timeout == 2.5

    def test_defaults_without_file(self):
        cfg = load_config(env={})
        assert cfg == Config()


class TestSignalParsing:
    def test_missing_confidence_has_dedicated_code(self):
        with pytest.raises(ProtocolError) as err:
            parse_signal(
                {
                    "key": "k",
                    "description": "d",
                    "evidence": [{"claim": "c", "source": "s"}],
                    "strength": "strong",
                    "direction": "stable",
                    "source_kind": "numeric",
                }
            )
        assert err.value.code == "missing_confidence"
        assert err.value.field_path == "signal.confidence"


class TestConcurrentSessions:
    def test_distinct_sessions_mutate_in_parallel(self, tmp_path, fixed_clock):
        engine = Engine(Store(str(tmp_path / "store.jsonl")))
        n_sessions, n_signals = 6, 6
        for i in range(n_sessions):
            engine.create_session(
                {"protocol": "precog", "id": f"p{i}", "theme_key": f"theme-{i}"}
            )
        errors = []

        def worker(session_id):
            try:
                for j in range(n_signals):
                    engine.apply_step(
                        session_id,
                        "signal",
                        {
                            "key": f"s{j}",
                            "description": f"signal {j}",
                            "evidence": [{"claim": "c", "source": "s"}],
                            "strength": "strong",
                            "direction": "stable",
                            "confidence": "verified",
                            "source_kind": "numeric",
                        },
                    )
            except Exception as exc:  # propagate to the main thread
                errors.append(exc)

        threads = [
            threading.Thread(target=worker, args=(f"p{i}",)) for i in range(n_sessions)
        ]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert errors == []
        records = engine.store.records()
        assert len(records) == n_sessions * (1 + n_signals)
        for i in range(n_sessions):
            view = engine.get_session(f"p{i}")
            assert len(view["signals"]) == n_signals
            assert view["revision"] == 1 + n_signals
