import { defineConfig } from "vitest/config";

// base "./" keeps asset URLs relative so the bundle works when the admin
// server mounts dist/ under /ui
export default defineConfig({
  base: "./",
  test: {
    environment: "happy-dom",
  },
});
