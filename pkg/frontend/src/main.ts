/** Browser bootstrap: wire the controller to real fetch and localStorage. */

import { ApiClient } from "./api.js";
import { ReviewController, StorageLike } from "./app.js";

const storage: StorageLike = {
  get: (key) => window.localStorage.getItem(key),
  set: (key, value) => window.localStorage.setItem(key, value),
};

const root = document.getElementById("app");
if (root === null) {
  throw new Error("missing #app element");
}

const api = new ApiClient((input, init) => window.fetch(input, init));
const controller = new ReviewController(root, api, storage);
void controller.start();
