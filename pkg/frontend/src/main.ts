import { Api } from "./api.js";
import { createApp } from "./app.js";

const root = document.getElementById("app");
if (!root) throw new Error("missing #app container");

// Served from the same origin as the API, so an empty base works both at
// /ui/ and behind a reverse proxy.
createApp(root, new Api("")).catch((err) => {
  root.textContent = `failed to start: ${err}`;
});
