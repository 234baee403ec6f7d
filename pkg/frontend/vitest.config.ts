import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "node",
    globalSetup: ["tests/setup/global.ts"],
    testTimeout: 30000,
    hookTimeout: 120000,
    // the integration suites share one live store; never interleave files
    fileParallelism: false,
  },
});
