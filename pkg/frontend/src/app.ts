import { Api, ApiError, ExampleResult, Followups } from "./api.js";

// The server already caps follow-ups at 4; slice again so a misbehaving
// backend cannot flood the chip row.
const CHIP_LIMIT = 4;
const SUGGESTION_LIMIT = 5;

export interface AppHandle {
  sessionId: string;
  root: HTMLElement;
}

const SKELETON = `
  <div class="topbar">
    <span class="app-title">Health Chat</span>
    <label class="topic-label">Topic
      <select id="topic-menu"></select>
    </label>
  </div>
  <div id="transcript"></div>
  <div id="chips"></div>
  <div class="example-row">
    <button id="example-btn" type="button" disabled>More examples</button>
  </div>
  <div id="example-card" hidden>
    <div id="example-title"></div>
    <div id="example-meta"></div>
    <div id="example-body"></div>
    <div id="example-disclaimer"></div>
  </div>
  <div class="input-row">
    <input id="query-input" type="text" autocomplete="off"
           placeholder="Ask about colorectal cancer...">
    <button id="send-btn" type="button">Send</button>
  </div>
  <ul id="suggest-list" hidden></ul>
  <div id="explain-popup" hidden>
    <button id="explain-btn" type="button">Introduction</button>
  </div>
`;

export async function createApp(root: HTMLElement, api: Api): Promise<AppHandle> {
  root.innerHTML = SKELETON;
  const pick = <T extends HTMLElement>(id: string) =>
    root.querySelector(`#${id}`) as T;

  const transcript = pick<HTMLDivElement>("transcript");
  const chipRow = pick<HTMLDivElement>("chips");
  const topicMenu = pick<HTMLSelectElement>("topic-menu");
  const exampleBtn = pick<HTMLButtonElement>("example-btn");
  const exampleCard = pick<HTMLDivElement>("example-card");
  const input = pick<HTMLInputElement>("query-input");
  const sendBtn = pick<HTMLButtonElement>("send-btn");
  const suggestList = pick<HTMLUListElement>("suggest-list");
  const popup = pick<HTMLDivElement>("explain-popup");
  const explainBtn = pick<HTMLButtonElement>("explain-btn");

  let sessionId = "";
  let busy = false;
  let exchanges = 0;
  let activeTopic: string | null = null;
  let suggestToken = 0;
  let pendingSelection = "";

  function updateControls() {
    input.disabled = busy;
    sendBtn.disabled = busy;
    topicMenu.disabled = busy;
    exampleBtn.disabled = busy || exchanges === 0;
    for (const chip of chipRow.querySelectorAll("button")) {
      chip.disabled = busy;
    }
  }

  function addBubble(kind: "user" | "agent" | "error", text: string): HTMLElement {
    const el = document.createElement("div");
    el.className = `msg msg-${kind}`;
    el.textContent = text;
    transcript.appendChild(el);
    el.scrollIntoView?.();
    return el;
  }

  function showError(err: unknown) {
    const message = err instanceof ApiError ? err.message : String(err);
    addBubble("error", message);
  }

  function renderChips(followups: Followups | null) {
    chipRow.textContent = "";
    if (!followups) return;
    for (const question of followups.questions.slice(0, CHIP_LIMIT)) {
      const chip = document.createElement("button");
      chip.type = "button";
      chip.className = "chip";
      chip.textContent = question;
      // Pass the label through unchanged: a clicked chip becomes the query
      // text exactly as served.
      chip.addEventListener("click", () => void sendQuery(question));
      chipRow.appendChild(chip);
    }
  }

  function renderTopics(names: string[]) {
    topicMenu.textContent = "";
    for (const name of names) {
      const option = document.createElement("option");
      option.value = name;
      option.textContent = name;
      topicMenu.appendChild(option);
    }
    topicMenu.selectedIndex = -1;
  }

  function setActiveTopic(name: string | null) {
    activeTopic = name;
    if (name && [...topicMenu.options].some((o) => o.value === name)) {
      topicMenu.value = name;
    } else {
      topicMenu.selectedIndex = -1;
    }
  }

  async function sendQuery(text: string): Promise<void> {
    if (busy || !text) return;
    busy = true;
    updateControls();
    hideSuggestions();
    // Optimistic user bubble; rolled back on failure so a rejected send
    // leaves the transcript as it was and the draft still in the input.
    const bubble = addBubble("user", text);
    try {
      const result = await api.sendMessage(sessionId, text);
      addBubble("agent", result.reply);
      renderChips(result.followups);
      setActiveTopic(result.active_topic);
      exchanges += 1;
      if (input.value.trim() === text.trim()) input.value = "";
    } catch (err) {
      bubble.remove();
      showError(err);
      input.value = text;
    } finally {
      busy = false;
      updateControls();
    }
  }

  function hideSuggestions() {
    suggestToken += 1; // orphan any lookup still in flight
    suggestList.hidden = true;
    suggestList.textContent = "";
  }

  async function refreshSuggestions(): Promise<void> {
    const q = input.value;
    const token = ++suggestToken;
    if (!q.trim()) {
      hideSuggestions();
      return;
    }
    let items: string[];
    try {
      items = await api.autocomplete(q);
    } catch {
      return; // typeahead is best-effort; never surface its failures
    }
    if (token !== suggestToken) return; // a newer keystroke superseded this one
    suggestList.textContent = "";
    const top = items.slice(0, SUGGESTION_LIMIT);
    if (top.length === 0) {
      suggestList.hidden = true;
      return;
    }
    for (const item of top) {
      const li = document.createElement("li");
      li.textContent = item;
      li.addEventListener("click", () => {
        input.value = item;
        hideSuggestions();
        input.focus();
      });
      suggestList.appendChild(li);
    }
    suggestList.hidden = false;
  }

  async function onTopicChange(): Promise<void> {
    const name = topicMenu.value;
    if (busy || !name || name === activeTopic) return;
    const previous = activeTopic;
    busy = true;
    updateControls();
    try {
      const result = await api.switchTopic(sessionId, name);
      activeTopic = result.topic;
      renderChips(result.followups);
    } catch (err) {
      showError(err);
      setActiveTopic(previous);
    } finally {
      busy = false;
      updateControls();
    }
  }

  async function onExample(): Promise<void> {
    if (busy || exchanges === 0) return;
    busy = true;
    updateControls();
    try {
      renderExample(await api.example(sessionId));
    } catch (err) {
      showError(err);
    } finally {
      busy = false;
      updateControls();
    }
  }

  function renderExample(result: ExampleResult) {
    pick<HTMLDivElement>("example-title").textContent = result.post.title;
    pick<HTMLDivElement>("example-meta").textContent =
      `${result.post.category} | engagement ${result.post.engagement}`;
    pick<HTMLDivElement>("example-body").textContent = result.post.body;
    pick<HTMLDivElement>("example-disclaimer").textContent = result.disclaimer;
    exampleCard.hidden = false;
  }

  function bubbleOf(node: Node | null): HTMLElement | null {
    let el: HTMLElement | null =
      node instanceof HTMLElement ? node : node?.parentElement ?? null;
    while (el && !el.classList.contains("msg")) el = el.parentElement;
    return el;
  }

  // A selection qualifies for the explain popup only when it is non-empty
  // and starts and ends inside the same agent bubble.
  function selectedAgentText(): string | null {
    const sel = window.getSelection?.();
    if (!sel || sel.isCollapsed || sel.rangeCount === 0) return null;
    const text = sel.toString().trim();
    if (!text) return null;
    const start = bubbleOf(sel.anchorNode);
    const end = bubbleOf(sel.focusNode);
    if (!start || start !== end || !start.classList.contains("msg-agent")) {
      return null;
    }
    return text;
  }

  function hidePopup() {
    popup.hidden = true;
    pendingSelection = "";
  }

  function maybeShowPopup() {
    const text = selectedAgentText();
    if (!text) {
      hidePopup();
      return;
    }
    pendingSelection = text;
    const sel = window.getSelection();
    const range = sel && sel.rangeCount > 0 ? sel.getRangeAt(0) : null;
    // Positioning is cosmetic; test DOMs may not implement layout rects.
    const rect = range?.getBoundingClientRect?.();
    if (rect) {
      popup.style.left = `${rect.left + window.scrollX}px`;
      popup.style.top = `${rect.bottom + window.scrollY + 4}px`;
    }
    popup.hidden = false;
  }

  async function onExplain(): Promise<void> {
    const selected = pendingSelection;
    hidePopup();
    if (busy || !selected) return;
    busy = true;
    updateControls();
    try {
      const result = await api.explain(sessionId, selected);
      addBubble("agent", result.reply);
      renderChips(result.followups);
      setActiveTopic(result.active_topic);
      exchanges += 1;
    } catch (err) {
      showError(err);
    } finally {
      busy = false;
      updateControls();
    }
  }

  sendBtn.addEventListener("click", () => {
    const text = input.value.trim();
    if (text) void sendQuery(text);
  });
  input.addEventListener("keydown", (e) => {
    if (e.key === "Enter") {
      const text = input.value.trim();
      if (text) void sendQuery(text);
    }
  });
  input.addEventListener("input", () => void refreshSuggestions());
  topicMenu.addEventListener("change", () => void onTopicChange());
  exampleBtn.addEventListener("click", () => void onExample());
  transcript.addEventListener("mouseup", () => maybeShowPopup());
  explainBtn.addEventListener("click", () => void onExplain());
  document.addEventListener("mousedown", (e) => {
    if (!popup.hidden && !popup.contains(e.target as Node)) hidePopup();
  });

  const [created, topicNames] = await Promise.all([
    api.createSession(),
    api.topics(),
  ]);
  sessionId = created.session_id;
  renderTopics(topicNames);
  addBubble("agent", created.greeting);
  renderChips(created.followups);
  setActiveTopic(created.active_topic);
  updateControls();

  return { sessionId, root };
}
