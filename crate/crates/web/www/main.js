import init, { analyze_kset, play_halving, clue_distribution } from "./pkg/carmen_web.js";

const $ = (id) => document.getElementById(id);
let n = 3;
let members = new Set();

// Coordinate 1 is the least significant bit of the index.
const label = (y) => Array.from({ length: n }, (_, i) => (y >> i) & 1).join("");

function hex() {
  let mask = 0n;
  for (const y of members) mask |= 1n << BigInt(y);
  const digits = Math.max(1, (1 << n) / 4);
  return mask.toString(16).padStart(digits, "0");
}

function drawCube() {
  const cube = $("cube");
  cube.replaceChildren();
  for (let y = 0; y < 1 << n; y++) {
    const box = document.createElement("label");
    const check = document.createElement("input");
    check.type = "checkbox";
    check.checked = members.has(y);
    check.onchange = () => {
      check.checked ? members.add(y) : members.delete(y);
      $("hex").textContent = hex();
    };
    box.append(check, " " + label(y));
    cube.append(box);
  }
  $("hex").textContent = hex();
}

function setN(value) {
  n = Math.min(6, Math.max(2, value | 0));
  members = new Set(Array.from({ length: 1 << n }, (_, y) => y).filter((y) => y < (1 << (n - 1)) + 1));
  $("pi").value = Array.from({ length: n }, (_, i) => i + 1).join(",");
  drawCube();
}

function show(target, call) {
  target.classList.remove("error");
  try {
    return call();
  } catch (e) {
    target.classList.add("error");
    target.textContent = String(e.message ?? e);
    return null;
  }
}

function analyse() {
  const out = show($("report"), () => JSON.parse(analyze_kset(n, hex())));
  if (out) $("report").textContent = JSON.stringify(out, null, 2);
}

function law() {
  const out = show($("report"), () => JSON.parse(clue_distribution(n, hex())));
  if (out) $("report").textContent = JSON.stringify(out.distribution, null, 2);
}

function play() {
  const table = $("trace");
  table.replaceChildren();
  const out = show($("outcome"), () => JSON.parse(play_halving(n, hex(), $("pi").value, $("z").value === "1")));
  if (!out) return;
  const row = (cells, tag = "td") => {
    const tr = document.createElement("tr");
    for (const c of cells) {
      const td = document.createElement(tag);
      td.textContent = c;
      tr.append(td);
    }
    table.append(tr);
  };
  row(["t", "city", "bit", "clue so far", "|K(w)|", "must exceed"], "th");
  for (const s of out.steps) row([s.t, s.city, s.bit, s.clue, s.remaining, s.floor]);
  $("outcome").textContent = JSON.stringify(out.outcome, null, 2);
}

await init();
$("n").onchange = (e) => setN(Number(e.target.value));
$("all").onclick = () => { members = new Set(Array.from({ length: 1 << n }, (_, y) => y)); drawCube(); };
$("none").onclick = () => { members = new Set(); drawCube(); };
$("random").onclick = () => {
  do {
    members = new Set(Array.from({ length: 1 << n }, (_, y) => y).filter(() => Math.random() < 0.65));
  } while (members.size <= 1 << (n - 1));
  drawCube();
};
$("analyze").onclick = analyse;
$("law").onclick = law;
$("play").onclick = play;
setN(3);
