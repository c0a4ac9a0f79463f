/**
 * Page entry point: reads the graph document embedded in the
 * `#graph-data` block and mounts the viewer into `#app`.
 */

import { initViewer } from "./viewer";

function boot(): void {
  const app = document.getElementById("app");
  if (app === null) {
    return;
  }
  const data = document.getElementById("graph-data");
  initViewer(app, data?.textContent ?? "");
}

if (document.readyState === "loading") {
  document.addEventListener("DOMContentLoaded", boot);
} else {
  boot();
}
