import { FetchLike } from "../src/api.js";

export const DISCLAIMER =
  "The following content is for reference only and has not been scientifically verified; " +
  "if you experience any health issues, please consult a medical professional promptly";

export const TOPIC_NAMES = [
  "Medical Definitions",
  "Medication Use",
  "Medical Decision-Making",
  "Colon Cancer Treatment",
  "Symptoms and Signs",
  "Misconceptions About Colonoscopy",
  "Family History Risks",
  "Cancer Prevention",
  "Dietary Focus",
  "Risk Factor Identification",
  "Pain Management",
  "Follow-Up Care",
  "Infection Prevention",
  "Dietary Preparation",
  "Colonoscopy Information",
  "Colon Cancer Screening Guidelines",
];

export interface RecordedCall {
  method: string;
  path: string;
  body: any;
  raw: string | null;
}

function json(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

function chipSet(questions: string[], method: string) {
  return questions.length ? { questions, method } : null;
}

/** In-memory stand-in for the chat server, with knobs for error and timing
 * behavior. Handlers mirror the real response shapes. */
export class StubBackend {
  calls: RecordedCall[] = [];
  greeting = "Hello, ask me anything about colorectal cancer.";
  sessionId = "s-1";
  initialChips = ["What is colorectal cancer?", "How is screening done?"];
  topics = TOPIC_NAMES;
  reply = "A grounded answer drawn from the reference pairs.";
  messageChips = ["Next question one?", "Next question two?"];
  topicChips = ["Topic question one?", "Topic question two?"];
  suggestions: (q: string) => string[] = () => [];
  activeTopic: string | null = null;
  // When set, the next POST fails with this error and the knob clears.
  error: { status: number; code: string; message: string } | null = null;
  // When set, message and explain handlers wait on it before replying.
  gate: Promise<void> | null = null;
  // Consumed FIFO, one per autocomplete call.
  autocompleteGates: Promise<void>[] = [];
  examplePost = {
    id: "post-0001",
    title: "My first week after surgery",
    body: "Day one was rough but walking got easier each morning.",
    category: "anti-cancer diaries",
    engagement: 42,
  };
  disclaimer = DISCLAIMER;

  fetchFn: FetchLike = (url, init) => this.handle(url, init);

  private async handle(url: string, init?: RequestInit): Promise<Response> {
    const u = new URL(url);
    const method = init?.method ?? "GET";
    const raw = typeof init?.body === "string" ? init.body : null;
    const body = raw ? JSON.parse(raw) : null;
    this.calls.push({ method, path: u.pathname + u.search, body, raw });

    if (method === "POST" && this.error) {
      const e = this.error;
      this.error = null;
      return json(e.status, { code: e.code, message: e.message });
    }
    if (method === "POST" && u.pathname === "/sessions") {
      return json(201, {
        greeting: this.greeting,
        session_id: this.sessionId,
        followups: chipSet(this.initialChips, "retrieval_based"),
        active_topic: null,
      });
    }
    if (u.pathname === "/topics") {
      return json(200, { topics: this.topics });
    }
    if (u.pathname === `/sessions/${this.sessionId}/messages`) {
      if (this.gate) await this.gate;
      return json(200, {
        reply: this.reply,
        session_id: this.sessionId,
        followups: chipSet(this.messageChips, "topic_llm"),
        active_topic: this.activeTopic,
      });
    }
    if (u.pathname === `/sessions/${this.sessionId}/explain`) {
      if (this.gate) await this.gate;
      return json(200, {
        reply: this.reply,
        session_id: this.sessionId,
        followups: chipSet(this.messageChips, "topic_llm"),
        active_topic: this.activeTopic,
      });
    }
    if (u.pathname === "/autocomplete") {
      const gate = this.autocompleteGates.shift();
      if (gate) await gate;
      return json(200, { suggestions: this.suggestions(u.searchParams.get("q") ?? "") });
    }
    if (method === "POST" && u.pathname === `/sessions/${this.sessionId}/topic`) {
      return json(200, {
        topic: body.topic,
        followups: chipSet(this.topicChips, "llm_only"),
      });
    }
    if (u.pathname === `/sessions/${this.sessionId}/example`) {
      return json(200, { post: this.examplePost, disclaimer: this.disclaimer });
    }
    return json(404, { code: "unknown_session", message: `no route for ${method} ${u.pathname}` });
  }
}

/** Poll until `cond` holds; the UI has no test hooks, so tests wait on the
 * DOM the way a browser driver would. */
export async function until(cond: () => boolean, ms = 3000): Promise<void> {
  const start = Date.now();
  while (!cond()) {
    if (Date.now() - start > ms) throw new Error("timed out waiting for condition");
    await new Promise((r) => setTimeout(r, 5));
  }
}

export function deferred(): { promise: Promise<void>; resolve: () => void } {
  let resolve!: () => void;
  const promise = new Promise<void>((r) => (resolve = r));
  return { promise, resolve };
}
