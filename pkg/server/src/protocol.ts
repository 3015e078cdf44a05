/**
 * ei-predict/1 message handling, one JSON object per line.
 *
 * Session shape: the client opens with {"protocol":"ei-predict/1",
 * "task":...}; the server answers with its protocol, task and
 * concurrency capability. Then any number of {"id", "rows", "task"}
 * requests, each answered by {"id", "outputs"}. {"bye":true} ends the
 * session. Malformed or invalid requests get {"id", "error"} replies and
 * the session continues.
 */

import type { PredictBackend } from "./linear.js";

export const PROTOCOL = "ei-predict/1";

export type Reply =
  | { kind: "reply"; payload: Record<string, unknown> }
  | { kind: "bye" }
  | { kind: "silent" };

function errorReply(id: unknown, message: string): Reply {
  return { kind: "reply", payload: { id: id ?? null, error: message } };
}

function validRows(rows: unknown): rows is number[][] {
  return (
    Array.isArray(rows) &&
    rows.length > 0 &&
    rows.every(
      (row) =>
        Array.isArray(row) &&
        row.length > 0 &&
        row.every((v) => Number.isInteger(v) && v >= 0)
    )
  );
}

export function handleLine(line: string, backend: PredictBackend): Reply {
  if (line.trim().length === 0) {
    return { kind: "silent" };
  }
  let message: Record<string, unknown>;
  try {
    const parsed: unknown = JSON.parse(line);
    if (typeof parsed !== "object" || parsed === null || Array.isArray(parsed)) {
      return errorReply(null, "expected a JSON object");
    }
    message = parsed as Record<string, unknown>;
  } catch {
    return errorReply(null, `unparseable request line`);
  }

  if (message["bye"] === true) {
    return { kind: "bye" };
  }

  if ("protocol" in message) {
    if (message["protocol"] !== PROTOCOL) {
      return errorReply(null, `unsupported protocol ${String(message["protocol"])}; this server speaks ${PROTOCOL}`);
    }
    return {
      kind: "reply",
      payload: { protocol: PROTOCOL, task: backend.task, concurrent: false },
    };
  }

  const id = message["id"];
  if (typeof id !== "number") {
    return errorReply(id, "request needs a numeric 'id'");
  }
  if ("task" in message && message["task"] !== backend.task) {
    return errorReply(id, `this server serves ${backend.task}, not ${String(message["task"])}`);
  }
  const rows = message["rows"];
  if (!validRows(rows)) {
    return errorReply(id, "'rows' must be a non-empty array of non-empty arrays of non-negative integers");
  }
  try {
    return { kind: "reply", payload: { id, outputs: backend.predict(rows) } };
  } catch (err) {
    return errorReply(id, `prediction failed: ${err instanceof Error ? err.message : String(err)}`);
  }
}
