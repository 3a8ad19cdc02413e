import { describe, expect, it } from "vitest";

import { Api, ApiError } from "../src/api.js";

function recordingFetch(status: number, body: unknown) {
  const calls: { url: string; init?: RequestInit }[] = [];
  const fetchFn = async (url: string, init?: RequestInit) => {
    calls.push({ url, init });
    return new Response(JSON.stringify(body), {
      status,
      headers: { "Content-Type": "application/json" },
    });
  };
  return { calls, fetchFn };
}

describe("request building", () => {
  it("strips trailing slashes from the base url", async () => {
    const { calls, fetchFn } = recordingFetch(201, { session_id: "s" });
    await new Api("http://x:1//", fetchFn).createSession();
    expect(calls[0].url).toBe("http://x:1/sessions");
  });

  it("sends only the query when no method is given", async () => {
    const { calls, fetchFn } = recordingFetch(200, { reply: "ok" });
    await new Api("http://x", fetchFn).sendMessage("s-1", "hello");
    expect(JSON.parse(calls[0].init?.body as string)).toEqual({ query: "hello" });
  });

  it("includes the method override when given", async () => {
    const { calls, fetchFn } = recordingFetch(200, { reply: "ok" });
    await new Api("http://x", fetchFn).sendMessage("s-1", "hello", "llm_only");
    expect(JSON.parse(calls[0].init?.body as string)).toEqual({
      query: "hello",
      method: "llm_only",
    });
  });

  it("url-encodes the autocomplete prefix", async () => {
    const { calls, fetchFn } = recordingFetch(200, { suggestions: ["a b?"] });
    const got = await new Api("http://x", fetchFn).autocomplete("a b?");
    expect(calls[0].url).toBe("http://x/autocomplete?q=a%20b%3F");
    expect(got).toEqual(["a b?"]);
  });

  it("posts an empty object for an example without a category", async () => {
    const { calls, fetchFn } = recordingFetch(200, { post: {}, disclaimer: "d" });
    await new Api("http://x", fetchFn).example("s-1");
    expect(calls[0].init?.body).toBe("{}");
  });

  it("posts the category when one is picked", async () => {
    const { calls, fetchFn } = recordingFetch(200, { post: {}, disclaimer: "d" });
    await new Api("http://x", fetchFn).example("s-1", "enteritis");
    expect(JSON.parse(calls[0].init?.body as string)).toEqual({ category: "enteritis" });
  });

  it("posts the selected term to explain", async () => {
    const { calls, fetchFn } = recordingFetch(200, { reply: "ok" });
    await new Api("http://x", fetchFn).explain("s-1", "ECG");
    expect(calls[0].url).toBe("http://x/sessions/s-1/explain");
    expect(JSON.parse(calls[0].init?.body as string)).toEqual({ selected: "ECG" });
  });
});

describe("error handling", () => {
  it("surfaces the server error shape as an ApiError", async () => {
    const { fetchFn } = recordingFetch(409, {
      code: "session_busy",
      message: "session s-1 is busy",
    });
    const err = await new Api("http://x", fetchFn)
      .sendMessage("s-1", "q")
      .catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(409);
    expect(err.code).toBe("session_busy");
    expect(err.message).toBe("session s-1 is busy");
  });

  it("falls back to a generic error for non-json bodies", async () => {
    const fetchFn = async () => new Response("gateway exploded", { status: 502 });
    const err = await new Api("http://x", fetchFn).topics().catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.code).toBe("http_error");
    expect(err.message).toBe("HTTP 502");
  });

  it("wraps transport failures with status 0", async () => {
    const fetchFn = async () => {
      throw new TypeError("connection refused");
    };
    const err = await new Api("http://x", fetchFn).createSession().catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(0);
    expect(err.code).toBe("network");
  });
});
