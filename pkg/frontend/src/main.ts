import { ApiClient } from "./api.js";
import { BlendPlanApp } from "./app.js";

const params = new URLSearchParams(window.location.search);
const baseUrl = params.get("api") ?? "";
const root = document.getElementById("app");
if (!root) {
  throw new Error("missing #app mount point");
}
const app = new BlendPlanApp({ api: new ApiClient(baseUrl), root, document });
void app.init();
