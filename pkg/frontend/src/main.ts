import { GatewayClient } from "./api.js";
import { Workbench } from "./ui.js";

const params = new URLSearchParams(window.location.search);
const base = params.get("gateway") ?? "http://127.0.0.1:8080";

const root = document.getElementById("app");
if (!root) throw new Error("missing #app element");
new Workbench(root, new GatewayClient(base));
