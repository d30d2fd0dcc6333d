import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    // the integration suite boots the Python service and plays full games
    testTimeout: 180_000,
    hookTimeout: 120_000,
    pool: "forks",
  },
});
