// Minimal DOM test environment: boots a jsdom window and projects its
// globals onto the worker, restoring everything on teardown. Living
// in-repo lets a globally installed test runner use the project-local
// jsdom install.

import { JSDOM } from "jsdom";

// handled explicitly after population
const SKIP = new Set([
  "window",
  "self",
  "top",
  "parent",
  "global",
  "globalThis",
  "eval",
  "undefined",
]);

// node built-ins the suites rely on staying native
const PRESERVE = new Set([
  "process",
  "Buffer",
  "console",
  "queueMicrotask",
  "structuredClone",
  "setTimeout",
  "clearTimeout",
  "setInterval",
  "clearInterval",
  "setImmediate",
  "clearImmediate",
  "performance",
  "fetch",
  "Headers",
  "Request",
  "Response",
  "crypto",
  "AbortController",
  "AbortSignal",
  "TextEncoder",
  "TextDecoder",
  "URL",
  "URLSearchParams",
  "Promise",
  "Symbol",
  "Reflect",
  "Proxy",
  "JSON",
  "Math",
  "Intl",
  "WebAssembly",
]);

function isClassLike(name: string): boolean {
  return name[0] === name[0].toUpperCase();
}

export default {
  name: "dom",
  viteEnvironment: "client",
  async setup(globalish: object) {
    const target = globalish as Record<string, unknown>;
    const dom = new JSDOM("<!DOCTYPE html>", {
      url: "http://localhost:3000",
      pretendToBeVisual: true,
    });
    const win = dom.window as unknown as Record<string, unknown>;

    const restored = new Map<string, PropertyDescriptor | undefined>();
    const remember = (key: string) => {
      if (!restored.has(key)) {
        restored.set(key, Object.getOwnPropertyDescriptor(target, key));
      }
    };

    for (const key of Object.getOwnPropertyNames(win)) {
      if (SKIP.has(key) || PRESERVE.has(key)) continue;
      const existing = Object.getOwnPropertyDescriptor(target, key);
      if (existing && !existing.configurable) continue;
      remember(key);
      const value = win[key];
      const projected =
        typeof value === "function" && !isClassLike(key)
          ? (value as (...args: unknown[]) => unknown).bind(win)
          : value;
      Object.defineProperty(target, key, {
        value: projected,
        writable: true,
        configurable: true,
      });
    }
    for (const key of ["window", "self", "top", "parent"]) {
      remember(key);
      Object.defineProperty(target, key, {
        value: target,
        writable: true,
        configurable: true,
      });
    }

    return {
      teardown() {
        for (const [key, descriptor] of restored) {
          if (descriptor === undefined) {
            delete target[key];
          } else {
            Object.defineProperty(target, key, descriptor);
          }
        }
        dom.window.close();
      },
    };
  },
};
