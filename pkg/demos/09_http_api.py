#!/usr/bin/env python3
# The HTTP gateway: synthesize, preview, feedback and bank inspection
# against a server running in a background thread.

import json
import threading

import requests

from jigsaw.context import ContextBank
from jigsaw.gateway.server import make_server
from jigsaw.gateway.state import AppState
from jigsaw.learn import RuleBank
from jigsaw.lang import parse
from jigsaw.modelio import ModelConfig
from jigsaw.pipeline import Banks, PipelineConfig
from jigsaw.tables import Env, FrameValue, eval_program, frame_to_json, value_to_json

people = FrameValue.make({"country": ["Name:France", "Name:Peru"]})
fix = "dfout = df['country'].str.replace('Name:', '')"
query = "Remove substring 'Name:' from column 'country' of df"
expected = eval_program(parse(fix), Env({"df": people})).bindings["dfout"]

state = AppState(
    banks=Banks(context=ContextBank(), rules=RuleBank()),
    cfg=PipelineConfig(model=ModelConfig(kind="mock", script={
        query: ["dfout = df['country'].str.replace('Name:', 'X')"],
    })),
)
server = make_server(state, port=0)
threading.Thread(target=server.serve_forever, daemon=True).start()
base = f"http://127.0.0.1:{server.server_address[1]}"
print("serving on", base)

body = {
    "query": query,
    "env": {"df": frame_to_json(people)},
    "output_name": "dfout",
    "expected": value_to_json(expected),
}
resp = requests.post(f"{base}/synthesize", json=body).json()
print("\ncandidates:")
for c in resp["candidates"][:3]:
    print(f"  [{c['status']}] ({c['origin']}) {c['code']}")

preview = requests.post(f"{base}/preview", json={
    "code": fix, "env": {"df": frame_to_json(people)}}).json()
print("\npreview of the corrected code:", preview["value"]["values"])

feedback = requests.post(f"{base}/feedback", json={
    "result_id": resp["result_id"], "code": fix}).json()
print("feedback outcome:", feedback)

bank = requests.get(f"{base}/bank/context").json()
print("bank now holds", len(bank), "entr(y/ies):", bank[0]["q"])

server.shutdown()
