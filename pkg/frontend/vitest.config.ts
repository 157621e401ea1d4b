// Plain object config (no framework import) so the file loads even when
// the test runner is installed globally rather than in node_modules.
export default {
  test: {
    environment: "./tests/env/dom.ts",
    include: ["tests/**/*.test.ts"],
  },
};
