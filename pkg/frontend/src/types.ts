/** JSON shapes returned by the blendplan service. */

export interface RecipesView {
  products: string[];
  components: string[];
  weights: number[][];
}

export interface StockView {
  quantities: number[];
  as_of: number | null;
}

export interface ChoiceView {
  option: number;
  product: string;
  quantity: number;
}

export interface ShortfallView {
  feasible: false;
  used: number[];
  required: number[];
}

export interface PlanFeasibleView {
  feasible: true;
  requirements: number[][];
  remaining: number[];
  root_choices: ChoiceView[];
}

export type PlanView = ShortfallView | PlanFeasibleView;

export interface SessionView {
  id: string;
  step: number;
  totals: number[];
  remaining: number[];
  choices: ChoiceView[];
  finished: boolean;
}

export interface VariantView {
  totals: number[];
  path: [number, number][];
}

export interface VariantsView {
  variants: VariantView[];
}

export interface ApiErrorBody {
  error: string;
  detail: string;
}

export function isShortfall(view: PlanView | SessionView | ShortfallView): view is ShortfallView {
  return "feasible" in view && view.feasible === false;
}
