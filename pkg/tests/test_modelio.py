import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from jigsaw.lang import free_names, parse, unparse
from jigsaw.modelio import (
    Completion, ModelConfig, PromptPair, TransportError,
    complete, corrupt, final_query_of, render_prompt,
)


def test_render_prompt_layout():
    pairs = [PromptPair("Find the mean of data", "data.mean()")]
    prompt = render_prompt(pairs, "Perform column-wise OR operation in df")
    assert prompt == (
        "import pandas as pd\n"
        "\n"
        "# Q: Find the mean of data\n"
        "data.mean()\n"
        "\n"
        "# Q: Perform column-wise OR operation in df\n"
    )
    assert final_query_of(prompt) == "Perform column-wise OR operation in df"


def test_render_prompt_zero_pairs():
    prompt = render_prompt([], "Load ./data.csv file")
    assert prompt == "import pandas as pd\n\n# Q: Load ./data.csv file\n"


def test_render_prompt_four_pairs():
    pairs = [PromptPair(f"q{i}", f"a{i}") for i in range(4)]
    prompt = render_prompt(pairs, "query")
    assert prompt.count("# Q: ") == 5
    for p in pairs:
        assert f"# Q: {p.question}\n{p.answer}\n" in prompt


def test_render_prompt_rejects_too_many_pairs():
    with pytest.raises(ValueError):
        render_prompt([PromptPair(f"q{i}", "a") for i in range(17)], "q")


def test_mock_deterministic_at_temperature_zero():
    cfg = ModelConfig(kind="mock", script={"q": ["x = y", "x = z"]}, n_completions=3)
    prompt = render_prompt([], "q")
    out = complete(cfg, prompt)
    assert [c.text for c in out] == ["x = y"] * 3
    assert [c.rank for c in out] == [0, 1, 2]
    assert [c.text for c in complete(cfg, prompt)] == [c.text for c in out]


def test_mock_temperature_widens_variants():
    cfg = ModelConfig(
        kind="mock", script={"q": ["a = b", "a = c", "a = d"]},
        temperature=1.0, n_completions=8, seed=3,
    )
    texts = {c.text for c in complete(cfg, render_prompt([], "q"))}
    assert len(texts) > 1
    repeat = {c.text for c in complete(cfg, render_prompt([], "q"))}
    assert texts == repeat  # seeded


def test_mock_requires_context():
    cfg = ModelConfig(kind="mock", script={
        "q": {"completions": ["out = good()"], "requires_context": "a1",
              "fallback": ["out = bad()"]},
    })
    with_pair = render_prompt([PromptPair("q1", "a1")], "q")
    without = render_prompt([], "q")
    assert complete(cfg, with_pair)[0].text == "out = good()"
    assert complete(cfg, without)[0].text == "out = bad()"


def test_mock_unscripted_query_yields_nothing():
    cfg = ModelConfig(kind="mock", script={})
    assert complete(cfg, render_prompt([], "novel")) == []


class _Handler(BaseHTTPRequestHandler):
    status = 200
    body = {"choices": [{"text": "df = pd.read_csv('./data.csv')"}]}

    def do_POST(self):
        length = int(self.headers.get("Content-Length", 0))
        type(self).last_request = json.loads(self.rfile.read(length))
        self.send_response(type(self).status)
        self.send_header("Content-Type", "application/json")
        self.end_headers()
        self.wfile.write(json.dumps(type(self).body).encode())

    def log_message(self, *args):
        pass


@pytest.fixture()
def http_server():
    server = ThreadingHTTPServer(("127.0.0.1", 0), _Handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_address[1]}/complete"
    server.shutdown()


def test_http_complete_round_trip(http_server):
    _Handler.status = 200
    _Handler.body = {"choices": [{"text": "x = y"}, {"text": "x = z"}]}
    cfg = ModelConfig(kind="http", endpoint=http_server, n_completions=2, auth_token="tok")
    out = complete(cfg, "prompt text")
    assert [c.text for c in out] == ["x = y", "x = z"]
    assert _Handler.last_request["prompt"] == "prompt text"
    assert _Handler.last_request["n"] == 2


def test_http_auth_error(http_server):
    _Handler.status = 401
    cfg = ModelConfig(kind="http", endpoint=http_server)
    with pytest.raises(TransportError) as err:
        complete(cfg, "p")
    assert err.value.kind == "auth"


def test_http_malformed_response(http_server):
    _Handler.status = 200
    _Handler.body = {"unexpected": True}
    cfg = ModelConfig(kind="http", endpoint=http_server)
    with pytest.raises(TransportError) as err:
        complete(cfg, "p")
    assert err.value.kind == "malformed_response"


def test_http_network_error():
    cfg = ModelConfig(kind="http", endpoint="http://127.0.0.1:1/nope", timeout=0.5)
    with pytest.raises(TransportError) as err:
        complete(cfg, "p")
    assert err.value.kind in ("network", "timeout")


# ----------------------------------------------------------------------
# corruption


def test_corrupt_var_rename_changes_only_names():
    p = parse("dfout = alpha.merge(beta)")
    corrupted, changed = corrupt(p, "var_rename", seed=7)
    assert changed
    assert free_names(corrupted) != free_names(p)
    # same shape modulo names
    assert unparse(corrupted).replace(
        sorted(free_names(corrupted))[0], "A"
    ) != unparse(p)
    again, _ = corrupt(p, "var_rename", seed=7)
    assert again == corrupted  # deterministic in seed


def test_corrupt_arg_mutation_drops_keyword():
    p = parse("dfout = df.drop_duplicates(subset=['inpB'], keep=False)")
    seen = set()
    for seed in range(12):
        corrupted, changed = corrupt(p, "arg_mutation", seed)
        assert changed
        seen.add(unparse(corrupted))
    assert "dfout = df.drop_duplicates(subset=['inpB'])" in seen


def test_corrupt_semantic_loc_variants():
    p = parse("dfout = dfin.loc[3, 'C']")
    seen = set()
    for seed in range(12):
        corrupted, changed = corrupt(p, "semantic", seed)
        assert changed
        seen.add(unparse(corrupted))
    assert "dfout = dfin.ix[3, 'C']" in seen
    assert "dfout = dfin.iloc[3, 'C']" in seen


def test_corrupt_semantic_drops_bitnot():
    p = parse("train = data[~data.index.isin(test.index)]")
    outputs = {unparse(corrupt(p, "semantic", s)[0]) for s in range(20)}
    assert "train = data[data.index.isin(test.index)]" in outputs


def test_corrupt_semantic_strips_parens():
    p = parse("dfout = dfin[(dfin['bar']<38)|(dfin['bar']>60)]")
    outputs = {unparse(corrupt(p, "semantic", s)[0]) for s in range(20)}
    assert "dfout = dfin[dfin['bar'] < 38 | dfin['bar'] > 60]" in outputs
    # every corruption still parses
    for text in outputs:
        parse(text)


def test_corrupt_no_applicable_site_is_identity():
    p = parse("x = 1")
    corrupted, changed = corrupt(p, "arg_mutation", seed=1)
    assert not changed and corrupted == p


def test_corrupt_outputs_parse():
    sources = [
        "dfout = dfin.replace({'location':{'United States':'US'},'zip':{3434:4343}})",
        "dfout=dfin[((x<40)|(y>53))&(z==4)]",
        "dfin['A'] = dfin['A'].rolling(3).mean()",
    ]
    for src in sources:
        p = parse(src)
        for cls in ("var_rename", "arg_mutation", "semantic"):
            corrupted, _ = corrupt(p, cls, seed=5)
            parse(unparse(corrupted))


def test_mock_with_corruption_mode_renames_variables():
    script = {"q": ["dfout = alpha.merge(beta)"]}
    cfg = ModelConfig(kind="mock", script=script, corruption="var_rename", seed=7)
    out = complete(cfg, render_prompt([], "q"))
    assert len(out) == 1
    corrupted = parse(out[0].text)
    original = parse(script["q"][0])
    assert corrupted != original
    assert free_names(corrupted) != free_names(original)
    # same tree modulo names: chain of calls is preserved
    from jigsaw.repair import extract_call_chain
    assert extract_call_chain(corrupted) == extract_call_chain(original)
    again = complete(cfg, render_prompt([], "q"))
    assert again[0].text == out[0].text
