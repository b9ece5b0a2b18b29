import { afterAll, afterEach, beforeAll, describe, expect, it, vi } from "vitest";
import { spawnSync } from "child_process";
import { existsSync, mkdirSync, rmSync, writeFileSync } from "fs";
import { dirname, join } from "path";
import { fileURLToPath } from "url";
import { main } from "../src/cli.js";

const HERE = dirname(fileURLToPath(import.meta.url));
const FIX = join(HERE, "fixtures");
const TMP = join(HERE, "tmp", "cli");
const DIP = join(FIX, "dip_j1.5.csv");

let stdout: string;
let stderr: string;

beforeAll(() => {
  mkdirSync(TMP, { recursive: true });
  vi.spyOn(process.stdout, "write").mockImplementation((s) => {
    stdout += String(s);
    return true;
  });
  vi.spyOn(process.stderr, "write").mockImplementation((s) => {
    stderr += String(s);
    return true;
  });
});
afterEach(() => {
  stdout = "";
  stderr = "";
});
afterAll(() => {
  vi.restoreAllMocks();
  rmSync(TMP, { recursive: true, force: true });
});

const run = (...argv: string[]) => {
  stdout = "";
  stderr = "";
  return main(argv);
};

describe("spec file mode", () => {
  it("renders from a JSON spec", () => {
    const out = join(TMP, "from_spec.svg");
    const specPath = join(TMP, "spec.json");
    writeFileSync(
      specPath,
      JSON.stringify({ input: DIP, kind: "line", x: "delta", y: "g2_b", logY: true, output: out })
    );
    expect(run(specPath)).toBe(0);
    expect(stdout).toContain(`wrote ${out}`);
    expect(existsSync(out)).toBe(true);
  });

  it("fails on unreadable or invalid spec files", () => {
    expect(run(join(TMP, "missing.json"))).toBe(1);
    expect(stderr).toMatch(/^error: /);
    const bad = join(TMP, "bad.json");
    writeFileSync(bad, "{ not json");
    expect(run(bad)).toBe(1);
    const wrong = join(TMP, "wrong.json");
    writeFileSync(wrong, JSON.stringify({ input: DIP, kind: "pie", x: "a", y: "b", output: "o" }));
    expect(run(wrong)).toBe(1);
    expect(stderr).toContain("must be one of: line, multi-line, contour");
  });
});

describe("flags mode", () => {
  it("renders from flags mirroring the spec fields", () => {
    const out = join(TMP, "from_flags.svg");
    const code = run(
      "--input", DIP, "--kind", "line", "--x", "delta", "--y", "g2_b", "--log-y", "--output", out
    );
    expect(code).toBe(0);
    expect(existsSync(out)).toBe(true);
  });

  it("reports validation errors through exit code 1", () => {
    expect(run("--input", DIP, "--kind", "contour", "--x", "j", "--y", "u", "--output", "o.svg")).toBe(1);
    expect(stderr).toContain("requires a z column");
  });

  it("rejects mixing a spec file with flags", () => {
    expect(run(join(TMP, "spec.json"), "--kind", "line")).toBe(1);
    expect(stderr).toContain("not both");
  });

  it("rejects an empty invocation and unknown flags", () => {
    expect(run()).toBe(1);
    expect(stderr).toContain("nothing to do");
    expect(run("--frobnicate")).toBe(1);
  });
});

describe("built binary", () => {
  it("runs as a subprocess", () => {
    const out = join(TMP, "from_subprocess.svg");
    const res = spawnSync(
      process.execPath,
      [
        join(HERE, "..", "dist", "cli.js"),
        "--input", DIP, "--kind", "line", "--x", "delta", "--y", "g2_b", "--output", out,
      ],
      { encoding: "utf8" }
    );
    expect(res.status).toBe(0);
    expect(res.stdout).toContain("wrote ");
    expect(existsSync(out)).toBe(true);
  });
});
