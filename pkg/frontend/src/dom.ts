/** Tiny DOM helpers; no framework. */

type Child = Node | string | null | undefined;

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string | boolean | ((event: Event) => void)> = {},
  ...children: Child[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (typeof value === "function") {
      node.addEventListener(key.replace(/^on/, ""), value);
    } else if (typeof value === "boolean") {
      if (value) node.setAttribute(key, "");
    } else {
      node.setAttribute(key, value);
    }
  }
  for (const child of children) {
    if (child === null || child === undefined) continue;
    node.append(typeof child === "string" ? document.createTextNode(child) : child);
  }
  return node;
}

export function clear(node: HTMLElement): void {
  while (node.firstChild) node.removeChild(node.firstChild);
}

/** Render a decimal money string ("2136.07") as "$2,136.07".
 *
 * Pure string formatting: the digits come from the API untouched, so the
 * element also carries the raw string in data-econ for traceability.
 */
export function moneyCell(tag: "td" | "span" | "strong", raw: string): HTMLElement {
  const node = el(tag, { "data-econ": raw });
  node.textContent = formatMoney(raw);
  return node;
}

export function formatMoney(raw: string): string {
  const negative = raw.startsWith("-");
  const bare = negative ? raw.slice(1) : raw;
  const [whole, cents] = bare.split(".");
  const grouped = whole.replace(/\B(?=(\d{3})+(?!\d))/g, ",");
  return `${negative ? "-" : ""}$${grouped}${cents !== undefined ? "." + cents : ""}`;
}
