import init, { growth, portrait, gamma } from "./pkg/portrait_growth_web.js";

const $ = (id) => document.getElementById(id);

function selection() {
  const group = document.querySelector("input[name=group]:checked").value;
  return { group, p: Number($("p").value), e: $("e").value };
}

function show(out, f) {
  out.classList.remove("error");
  try {
    out.textContent = f();
  } catch (err) {
    out.classList.add("error");
    out.textContent = String(err);
  }
}

await init();

$("growth-run").addEventListener("click", () => {
  const { group, p, e } = selection();
  show($("growth-out"), () => growth(group, p, e, Number($("growth-n").value)));
});

$("portrait-run").addEventListener("click", () => {
  const { group, p, e } = selection();
  show($("portrait-out"), () => portrait(group, p, e, $("word").value));
});

$("gamma-run").addEventListener("click", () => {
  const { group, p, e } = selection();
  show($("gamma-out"), () => gamma(group, p, e, Number($("gamma-n").value)));
});
