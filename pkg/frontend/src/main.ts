/** Browser bootstrap: base URL and token come from the query string or
 * localStorage; everything else lives behind the API. */

import { ApiClient } from "./api.js";
import { App } from "./app.js";

const params = new URLSearchParams(window.location.search);
const baseUrl =
  params.get("api") ?? localStorage.getItem("secplanner.api") ?? "http://127.0.0.1:8080";
const token = params.get("token") ?? localStorage.getItem("secplanner.token");

localStorage.setItem("secplanner.api", baseUrl);
if (token) localStorage.setItem("secplanner.token", token);

const root = document.getElementById("app");
if (!root) throw new Error("missing #app mount point");

const app = new App(new ApiClient(baseUrl, token), root);
void app.init();
