import { type ChildProcessWithoutNullStreams, spawn } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

const HERE = dirname(fileURLToPath(import.meta.url));
const SERVER = join(HERE, "..", "dist", "server.js");

export function writeSpec(spec: object, name = "model.json"): string {
  const dir = mkdtempSync(join(tmpdir(), "ei-server-"));
  const path = join(dir, name);
  writeFileSync(path, JSON.stringify(spec));
  return path;
}

/** Line-oriented driver around a spawned server process. */
export class ServerSession {
  proc: ChildProcessWithoutNullStreams;
  private buffer = "";
  private lines: string[] = [];
  private waiters: Array<(line: string) => void> = [];
  exitCode: number | null = null;
  private exitWaiters: Array<(code: number | null) => void> = [];

  constructor(args: string[]) {
    this.proc = spawn("node", [SERVER, ...args], { stdio: ["pipe", "pipe", "pipe"] });
    this.proc.stdout.setEncoding("utf8");
    this.proc.stdout.on("data", (chunk: string) => {
      this.buffer += chunk;
      let idx = this.buffer.indexOf("\n");
      while (idx >= 0) {
        const line = this.buffer.slice(0, idx);
        this.buffer = this.buffer.slice(idx + 1);
        const waiter = this.waiters.shift();
        if (waiter) {
          waiter(line);
        } else {
          this.lines.push(line);
        }
        idx = this.buffer.indexOf("\n");
      }
    });
    this.proc.on("exit", (code) => {
      this.exitCode = code;
      for (const w of this.exitWaiters.splice(0)) w(code);
    });
  }

  send(message: object | string): void {
    const line = typeof message === "string" ? message : JSON.stringify(message);
    this.proc.stdin.write(line + "\n");
  }

  readLine(timeoutMs = 5000): Promise<string> {
    const queued = this.lines.shift();
    if (queued !== undefined) {
      return Promise.resolve(queued);
    }
    return new Promise((resolve, reject) => {
      const timer = setTimeout(() => reject(new Error("timed out waiting for a reply")), timeoutMs);
      this.waiters.push((line) => {
        clearTimeout(timer);
        resolve(line);
      });
    });
  }

  async request(message: object): Promise<any> {
    this.send(message);
    return JSON.parse(await this.readLine());
  }

  async handshake(task: string): Promise<any> {
    return this.request({ protocol: "ei-predict/1", task });
  }

  waitForExit(timeoutMs = 5000): Promise<number | null> {
    if (this.exitCode !== null || this.proc.exitCode !== null) {
      return Promise.resolve(this.exitCode ?? this.proc.exitCode);
    }
    return new Promise((resolve, reject) => {
      const timer = setTimeout(() => reject(new Error("server did not exit")), timeoutMs);
      this.exitWaiters.push((code) => {
        clearTimeout(timer);
        resolve(code);
      });
    });
  }

  kill(): void {
    if (this.proc.exitCode === null) {
      this.proc.kill();
    }
  }
}
