import { GatewayClient } from "./api";
import { mountApp } from "./app";

document.addEventListener("DOMContentLoaded", () => {
  const root = document.getElementById("app");
  if (root) mountApp(root, new GatewayClient(""));
});
