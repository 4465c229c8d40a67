"""Service engine: lifecycle, one-time challenges, tokens, journaling."""

import json

import pytest

from adaptcha.challenge.audio import DIGIT_WORDS
from adaptcha.service.config import ConfigError, ServiceConfig, config_from_dict
from adaptcha.service.core import (
    ApiError,
    CaptchaService,
    NonceSource,
    SessionState,
    VirtualClock,
    make_pass_token,
    verify_pass_token,
)
from adaptcha.service.journal import EVENT_Q_UPDATE, EVENT_RESPONSE_SUBMITTED, Journal, replay_events
from conftest import bot_telemetry, ground_truth, human_telemetry, submit_after


def test_create_session_distinct_ids(engine):
    a = engine.create_session()
    b = engine.create_session()
    assert a["session_id"] != b["session_id"]
    assert a["state"] == "created"
    assert sum(1 for e in engine.journal.events if e["event"] == "session_created") == 2


def test_happy_path_verified_with_token(engine):
    sid = engine.create_session()["session_id"]
    payload = engine.issue_challenge(sid, "grid")
    truth = ground_truth(engine, sid)
    resp = submit_after(
        engine, sid, payload["challenge_id"],
        {"indices": sorted(truth.target_indices)}, human_telemetry(), 6.0,
    )
    assert resp["state"] == "verified_human"
    assert resp["verdict"]["label"] == "human"
    token = resp["token"]
    assert verify_pass_token(engine._hmac_key, sid, token)
    verdict = engine.get_verdict(sid)
    assert verdict["state"] == "verified_human"
    assert verify_pass_token(engine._hmac_key, sid, verdict["token"])


def test_tampered_token_fails(engine):
    sid = engine.create_session()["session_id"]
    payload = engine.issue_challenge(sid, "grid")
    truth = ground_truth(engine, sid)
    resp = submit_after(engine, sid, payload["challenge_id"],
                        {"indices": sorted(truth.target_indices)}, human_telemetry(), 6.0)
    token = resp["token"]
    flipped = token[:-1] + ("0" if token[-1] != "0" else "1")
    assert not verify_pass_token(engine._hmac_key, sid, flipped)
    assert not verify_pass_token(engine._hmac_key, "other-session", token)
    assert not verify_pass_token(engine._hmac_key, sid, "garbage")


def test_bot_telemetry_blocked_despite_correct_answer(engine):
    sid = engine.create_session()["session_id"]
    payload = engine.issue_challenge(sid, "grid")
    truth = ground_truth(engine, sid)
    resp = submit_after(engine, sid, payload["challenge_id"],
                        {"indices": sorted(truth.target_indices)}, bot_telemetry(), 0.03)
    assert resp["state"] == "blocked"
    assert resp["verdict"]["label"] == "bot"
    assert resp["verdict"]["flags"]["no_movement"]
    assert "token" not in resp
    assert engine.get_verdict(sid) == {"state": "blocked"}


def test_wrong_answer_escalates_and_reissues(engine):
    sid = engine.create_session()["session_id"]
    payload = engine.issue_challenge(sid, "grid")
    truth = ground_truth(engine, sid)
    wrong = [i for i in range(9) if i not in truth.target_indices][:3]
    resp = submit_after(engine, sid, payload["challenge_id"],
                        {"indices": wrong}, human_telemetry(), 6.5)
    assert resp["verdict"]["label"] == "human"
    assert resp["state"] == "challenged"
    nxt = resp["next_challenge"]
    assert nxt["challenge_id"] != payload["challenge_id"]
    # journal shows the escalated hop
    states = [e["state"] for e in engine.journal.events if e["event"] == "verdict"]
    assert states[-1] == "escalated"


def test_issue_in_wrong_state_conflicts(engine):
    sid = engine.create_session()["session_id"]
    engine.issue_challenge(sid, "grid")
    with pytest.raises(ApiError) as err:
        engine.issue_challenge(sid, "grid")
    assert err.value.status == 409


def test_unknown_session_not_found(engine):
    with pytest.raises(ApiError) as err:
        engine.issue_challenge("f" * 32, "grid")
    assert err.value.status == 404
    with pytest.raises(ApiError):
        engine.get_verdict("f" * 32)


def test_consumed_challenge_gone(engine):
    sid = engine.create_session()["session_id"]
    payload = engine.issue_challenge(sid, "grid")
    truth = ground_truth(engine, sid)
    submit_after(engine, sid, payload["challenge_id"],
                 {"indices": sorted(truth.target_indices)}, human_telemetry(), 6.0)
    with pytest.raises(ApiError) as err:
        engine.submit_response(sid, payload["challenge_id"], {"indices": [0]}, human_telemetry())
    assert err.value.status == 410


def test_unknown_challenge_id_not_found(engine):
    sid = engine.create_session()["session_id"]
    engine.issue_challenge(sid, "grid")
    with pytest.raises(ApiError) as err:
        engine.submit_response(sid, "9" * 32, {"indices": [0]}, human_telemetry())
    assert err.value.status == 404


def test_malformed_telemetry_is_bot_signal_not_error(engine):
    sid = engine.create_session()["session_id"]
    payload = engine.issue_challenge(sid, "grid")
    truth = ground_truth(engine, sid)
    resp = submit_after(engine, sid, payload["challenge_id"],
                        {"indices": sorted(truth.target_indices)},
                        [{"kind": "teleport", "t": -5}], 6.0)
    assert resp["state"] == "blocked"
    assert resp["verdict"]["label"] == "bot"


def test_malformed_solution_invalid(engine):
    sid = engine.create_session()["session_id"]
    payload = engine.issue_challenge(sid, "grid")
    with pytest.raises(ApiError) as err:
        engine.submit_response(sid, payload["challenge_id"], {"transcript": "hi"}, human_telemetry())
    assert err.value.status == 422
    with pytest.raises(ApiError):
        engine.submit_response(sid, payload["challenge_id"], {"indices": [1, 1]}, human_telemetry())


def test_audio_round_trip(engine):
    sid = engine.create_session()["session_id"]
    payload = engine.issue_challenge(sid, "audio")
    truth = ground_truth(engine, sid)
    resp = submit_after(engine, sid, payload["challenge_id"],
                        {"transcript": truth.expected_transcript.upper()}, human_telemetry(), 7.0)
    assert resp["state"] == "verified_human"


def test_paired_modality_first_word_matches_grid(engine):
    sid = engine.create_session()["session_id"]
    engine.issue_challenge(sid, "paired")
    rec = engine._session(sid)
    grid = rec.outstanding.challenge
    audio = rec.outstanding.paired_audio
    words = [t for t in audio.tokens if t not in DIGIT_WORDS]
    assert words[0] == grid.target_category.value


def test_budget_cap_blocks(engine):
    sid = engine.create_session()["session_id"]
    payload = engine.issue_challenge(sid, "grid")
    for round_no in range(engine.config.max_challenges_per_session):
        truth = ground_truth(engine, sid)
        wrong = [i for i in range(9) if i not in truth.target_indices][:3]
        resp = submit_after(engine, sid, payload["challenge_id"],
                            {"indices": wrong}, human_telemetry(), 6.0)
        if resp["state"] == "blocked":
            break
        payload = resp["next_challenge"]
    assert resp["state"] == "blocked"
    assert len(engine._session(sid).history) == engine.config.max_challenges_per_session


def test_exactly_one_q_update_per_response(engine):
    sid = engine.create_session()["session_id"]
    payload = engine.issue_challenge(sid, "grid")
    truth = ground_truth(engine, sid)
    wrong = [i for i in range(9) if i not in truth.target_indices][:3]
    resp = submit_after(engine, sid, payload["challenge_id"], {"indices": wrong}, human_telemetry(), 6.0)
    payload = resp["next_challenge"]
    truth = ground_truth(engine, sid)
    submit_after(engine, sid, payload["challenge_id"],
                 {"indices": sorted(truth.target_indices)}, human_telemetry(), 6.0)
    responses = sum(1 for e in engine.journal.events if e["event"] == EVENT_RESPONSE_SUBMITTED)
    updates = sum(1 for e in engine.journal.events if e["event"] == EVENT_Q_UPDATE)
    assert responses == updates == 2


def test_get_verdict_has_no_side_effects(engine):
    sid = engine.create_session()["session_id"]
    n = len(engine.journal.events)
    engine.get_verdict(sid)
    engine.get_verdict(sid)
    assert len(engine.journal.events) == n


def test_payload_never_contains_ground_truth(engine):
    sid = engine.create_session()["session_id"]
    for modality in ("grid", "audio", "paired"):
        svc = CaptchaService(
            ServiceConfig(seed_mode="fixed", seed=5, assets="inline"),
            clock=VirtualClock(), journal=Journal(),
        )
        sid = svc.create_session()["session_id"]
        payload = svc.issue_challenge(sid, modality)
        truth = svc._session(sid).outstanding.challenge
        text = json.dumps(payload)
        assert "target_indices" not in text
        assert "expected_transcript" not in text
        if hasattr(truth, "target_indices"):
            assert json.dumps(sorted(truth.target_indices)) not in text
        else:
            assert truth.expected_transcript not in text


def test_journal_replay_matches_live_states(engine):
    import itertools

    for k in range(30):
        sid = engine.create_session()["session_id"]
        payload = engine.issue_challenge(sid, "grid")
        truth = ground_truth(engine, sid)
        if k % 3 == 0:
            answer = {"indices": sorted(truth.target_indices)}
            telemetry = human_telemetry()
        elif k % 3 == 1:
            answer = {"indices": [0, 1, 2]}
            telemetry = bot_telemetry()
        else:
            answer = {"indices": [i for i in range(9) if i not in truth.target_indices][:3]}
            telemetry = human_telemetry()
        resp = submit_after(engine, sid, payload["challenge_id"], answer, telemetry, 6.0)
        while resp["state"] == "challenged":
            truth = ground_truth(engine, sid)
            resp = submit_after(engine, sid, resp["next_challenge"]["challenge_id"],
                                {"indices": sorted(truth.target_indices)}, human_telemetry(), 6.0)
    replayed = replay_events(engine.journal.events)
    for sid, rec in replayed.items():
        assert rec.state == engine._session(sid).state.value


def test_fixed_seed_runs_identical_after_timestamp_canonicalization():
    # same scripted client against two services whose wall clocks differ
    # by an arbitrary offset: canonicalized journals must match exactly
    from adaptcha.service.journal import canonicalize

    def scripted_run(clock_start: float):
        svc = CaptchaService(
            ServiceConfig(seed_mode="fixed", seed=31, assets="none"),
            clock=VirtualClock(clock_start), journal=Journal(),
        )
        for k in range(10):
            sid = svc.create_session()["session_id"]
            payload = svc.issue_challenge(sid, ("grid", "audio", "paired")[k % 3])
            truth = svc._session(sid).outstanding.challenge
            solution = (
                {"indices": sorted(truth.target_indices)}
                if hasattr(truth, "target_indices")
                else {"transcript": truth.expected_transcript}
            )
            telemetry = human_telemetry() if k % 2 == 0 else bot_telemetry()
            svc.clock.advance(6.0 if k % 2 == 0 else 0.03)
            svc.submit_response(sid, payload["challenge_id"], solution, telemetry)
            svc.clock.advance(1.0)
        return svc.journal.events

    a = canonicalize(scripted_run(0.0))
    b = canonicalize(scripted_run(1_700_000_000.0))
    assert a == b


def test_nonce_source_unique_and_deterministic():
    fixed_a = NonceSource(42)
    fixed_b = NonceSource(42)
    seq_a = [fixed_a.next() for _ in range(100)]
    seq_b = [fixed_b.next() for _ in range(100)]
    assert seq_a == seq_b
    assert len(set(seq_a)) == 100
    entropy = NonceSource()
    assert len({entropy.next() for _ in range(100)}) == 100


def test_pass_token_round_trip():
    key = b"k" * 16
    token = make_pass_token(key, "abc", 1234.9)
    assert verify_pass_token(key, "abc", token)
    assert not verify_pass_token(b"other-key", "abc", token)


class TestConfig:
    def test_invalid_fields_named(self):
        with pytest.raises(ConfigError, match="initial_level"):
            ServiceConfig(initial_level=7)
        with pytest.raises(ConfigError, match="time_limit_s"):
            ServiceConfig(time_limit_s=0)
        with pytest.raises(ConfigError, match="seed_mode"):
            ServiceConfig(seed_mode="maybe")
        with pytest.raises(ConfigError, match="assets"):
            ServiceConfig(assets="carved-in-stone")

    def test_from_dict_rejects_unknown_keys(self):
        with pytest.raises(ConfigError, match="not_a_field"):
            config_from_dict({"not_a_field": 1})

    def test_from_dict_parses_rl_params(self):
        cfg = config_from_dict({"rl": {"alpha": 0.2, "gamma": 0.8}})
        assert cfg.rl.alpha == 0.2
        with pytest.raises(ConfigError, match="rl"):
            config_from_dict({"rl": {"alpha": 2.0}})
