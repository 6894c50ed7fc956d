import { renderChart } from "./charts.js";
import type { ScreenPayload, VizSpec } from "./types.js";

export interface TileHandlers {
  selectedId?: string | null;
  onTileClick?: (specId: string) => void;
}

function renderTile(doc: Document, spec: VizSpec, handlers: TileHandlers): HTMLElement {
  const tile = doc.createElement("article");
  tile.className = "tile";
  tile.dataset.specId = spec.id;
  tile.dataset.layoutState = spec.layout.state;
  if (handlers.selectedId === spec.id) {
    tile.classList.add("selected");
  }

  const header = doc.createElement("header");
  const idBadge = doc.createElement("span");
  idBadge.className = "tile-id";
  idBadge.textContent = spec.id;
  const title = doc.createElement("h3");
  title.textContent = spec.title;
  header.appendChild(idBadge);
  header.appendChild(title);
  tile.appendChild(header);

  tile.appendChild(renderChart(doc, spec));

  const entities = doc.createElement("ul");
  entities.className = "entities";
  for (const entity of spec.entities) {
    const chip = doc.createElement("li");
    chip.textContent = entity.value ? `${entity.slot}=${entity.value}` : entity.slot;
    entities.appendChild(chip);
  }
  tile.appendChild(entities);

  if (handlers.onTileClick) {
    tile.addEventListener("click", () => handlers.onTileClick?.(spec.id));
  }
  return tile;
}

/**
 * One tile per spec, mirroring the latest screen update exactly. The grid is
 * a pure function of (screen payload, selected id): rendering the same
 * inputs twice yields identical markup.
 */
export function renderScreen(doc: Document, screen: ScreenPayload, handlers: TileHandlers = {}): HTMLElement {
  const grid = doc.createElement("section");
  grid.className = "screen-grid";
  for (const spec of screen.specs) {
    grid.appendChild(renderTile(doc, spec, handlers));
  }
  if (screen.specs.length === 0) {
    const empty = doc.createElement("p");
    empty.className = "screen-empty";
    empty.textContent = "Screen is empty. Ask for a visualization.";
    grid.appendChild(empty);
  }
  return grid;
}
