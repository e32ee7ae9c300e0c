import { ApiClient } from "./api.js";
import { NavigatorApp } from "./app.js";

async function boot(): Promise<void> {
  const api = new ApiClient("");
  const { trees } = await api.listTrees();
  if (!trees.length) {
    document.body.textContent = "No trees in the store.";
    return;
  }
  const params = new URLSearchParams(window.location.search);
  const treeId = params.get("tree") ?? trees[0];
  const treeExport = await api.getTree(treeId);

  const app = new NavigatorApp(
    api,
    {
      local: document.getElementById("local-panel")!,
      tree: document.getElementById("tree-panel")!,
      outputs: document.getElementById("outputs-panel")!,
      toolbar: document.getElementById("toolbar")!,
    },
    treeExport,
  );
  await app.start(treeId);
}

boot().catch((error) => {
  document.body.textContent = `failed to start: ${error}`;
});
