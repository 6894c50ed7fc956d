import { SessionClient } from "./api.js";
import { ScreenApp } from "./app.js";

// served by the backend under /ui, so the API lives at the same origin
const baseUrl = window.location.origin;
const client = new SessionClient(baseUrl, window.fetch.bind(window));
const root = document.getElementById("app");
if (!root) {
  throw new Error("missing #app mount point");
}
const app = new ScreenApp({ doc: document, root, client, webSocketImpl: window.WebSocket });
void app.start();
