import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    environment: "node",
    // The e2e suite boots the python session service in a child process.
    testTimeout: 30_000,
    hookTimeout: 60_000,
  },
});
