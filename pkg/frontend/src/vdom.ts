/**
 * Minimal virtual-node layer.
 *
 * View builders return plain VNode trees so tests can inspect rendered
 * output in Node without a DOM; the browser entry point materializes the
 * same trees with `mount`.
 */

export interface VNode {
  tag: string;
  attrs: Record<string, string>;
  children: (VNode | string)[];
  on?: Record<string, (event: Event) => void>;
}

type Child = VNode | string | null | undefined | false;

export function h(
  tag: string,
  attrs: Record<string, string> = {},
  ...children: (Child | Child[])[]
): VNode {
  const flat: (VNode | string)[] = [];
  for (const child of children.flat()) {
    if (child === null || child === undefined || child === false) continue;
    flat.push(child);
  }
  return { tag, attrs, children: flat };
}

export function withHandlers(
  node: VNode,
  on: Record<string, (event: Event) => void>,
): VNode {
  return { ...node, on: { ...(node.on ?? {}), ...on } };
}

/** Depth-first search over a rendered tree. */
export function findAll(
  node: VNode,
  predicate: (n: VNode) => boolean,
): VNode[] {
  const out: VNode[] = [];
  const walk = (n: VNode) => {
    if (predicate(n)) out.push(n);
    for (const child of n.children) {
      if (typeof child !== "string") walk(child);
    }
  };
  walk(node);
  return out;
}

export function textOf(node: VNode): string {
  let out = "";
  for (const child of node.children) {
    out += typeof child === "string" ? child : textOf(child);
  }
  return out;
}

export function mount(node: VNode, parent: Element): Element {
  const el = document.createElement(node.tag);
  for (const [key, value] of Object.entries(node.attrs)) {
    el.setAttribute(key, value);
  }
  if (node.on) {
    for (const [event, handler] of Object.entries(node.on)) {
      el.addEventListener(event, handler);
    }
  }
  for (const child of node.children) {
    if (typeof child === "string") {
      el.appendChild(document.createTextNode(child));
    } else {
      mount(child, el);
    }
  }
  parent.appendChild(el);
  return el;
}

export function replaceChildren(parent: Element, ...nodes: VNode[]): void {
  parent.replaceChildren();
  for (const node of nodes) mount(node, parent);
}
